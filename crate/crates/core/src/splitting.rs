//! The Douglas-Rachford operator `T = Id - J_A + J_B R_A` for an ordered
//! operator pair, iteration with trace capture, minimal-displacement
//! estimators, range-membership probing, and the exact algebraic identity
//! checks the theory rests on.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operators::MonotoneOp;
use crate::ranges::{self, SufficientCondition};
use crate::sets::Point;

/// An ordered pair `(A, B)` of maximally monotone operators on a common
/// space; the object `T` and `Id - T` act on.
#[derive(Clone, Debug)]
pub struct DrInstance {
    op_a: MonotoneOp,
    op_b: MonotoneOp,
    dim: usize,
}

/// Captured sequences of one run `x_{n+1} = T x_n`.
///
/// `differences[n]` is exactly `governing[n] - governing[n+1]`, and
/// `shadow_a_inv[n]` is exactly `governing[n] - shadow_a[n]`.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    pub governing: Vec<Point>,
    pub shadow_a: Vec<Point>,
    pub shadow_a_inv: Vec<Point>,
    pub differences: Vec<Point>,
    pub diff_norms: Vec<f64>,
    pub step_count: usize,
}

/// Verdict of an estimator that compares two convergent routes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateVerdict {
    Agree,
    Inconclusive,
}

/// Minimal displacement estimate. The difference estimator is the primary
/// value; the Cesaro estimate `-x_N / N` is reported alongside with the gap
/// between the two.
#[derive(Clone, Debug)]
pub struct VEstimate {
    pub difference: Point,
    pub cesaro: Point,
    pub gap: f64,
    pub verdict: EstimateVerdict,
}

impl VEstimate {
    /// The primary estimate.
    pub fn value(&self) -> &Point {
        &self.difference
    }
}

/// Split estimate of the domain-gap and range-gap vectors from the shadow
/// sequences of a trace.
#[derive(Clone, Debug)]
pub struct SplitEstimate {
    pub v_dom: Point,
    pub v_ran: Point,
    pub orth_defect: f64,
    pub sum_defect: f64,
    pub condition: SufficientCondition,
}

/// Outcome of probing whether `w` lies in the closure of `ran(Id - T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipVerdict {
    InClosure,
    NotInClosure,
    Inconclusive,
}

/// Per-stage record of the membership probe: for each `n` the regularized
/// equation `w = (1 + 1/n^2) x - T x` is solved and `(1/n^2) |x_n|` is
/// tracked. Scaled norms decaying to zero certify closure membership;
/// stabilization at a positive value is read as exclusion.
#[derive(Clone, Debug)]
pub struct MembershipProbeResult {
    pub n_schedule: Vec<u64>,
    pub iterate_norms: Vec<f64>,
    pub scaled_norms: Vec<f64>,
    pub stage_converged: Vec<bool>,
    pub verdict: MembershipVerdict,
    /// The last `(1/n^2) x_n`; for `w` outside the closure this tracks the
    /// residual vector `w - P(w)` numerically.
    pub residual_estimate: Point,
}

/// Parameters of the membership probe.
#[derive(Clone, Debug)]
pub struct ProbeParams {
    /// Strictly increasing regularization schedule.
    pub n_schedule: Vec<u64>,
    /// Inner fixed-point residual target is `inner_tol / n^2` per stage.
    pub inner_tol: f64,
    /// Cap on resolvent-pair evaluations per stage.
    pub inner_max: usize,
    /// Decision threshold on the final scaled norm.
    pub abs_tol: f64,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams {
            n_schedule: (1..=14).map(|k| 1u64 << k).collect(),
            inner_tol: 1e-3,
            inner_max: 50_000,
            abs_tol: 1e-6,
        }
    }
}

/// The unconditional 5-tuple of the graph identity check.
#[derive(Clone, Debug)]
pub struct GraphTuple {
    pub a: Point,
    pub b: Point,
    pub a_star: Point,
    pub b_star: Point,
    pub x: Point,
}

impl DrInstance {
    pub fn new(op_a: MonotoneOp, op_b: MonotoneOp) -> Result<Self> {
        if op_a.dim() != op_b.dim() {
            return Err(Error::dim(op_a.dim(), op_b.dim()));
        }
        let dim = op_a.dim();
        Ok(DrInstance { op_a, op_b, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn op_a(&self) -> &MonotoneOp {
        &self.op_a
    }

    pub fn op_b(&self) -> &MonotoneOp {
        &self.op_b
    }

    /// `T x = x - J_A x + J_B(2 J_A x - x)`; firmly nonexpansive.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        let ja = self.op_a.resolvent(x)?;
        let ra = &ja * 2.0 - x;
        let jb = self.op_b.resolvent(&ra)?;
        Ok(x - ja + jb)
    }

    /// `x - T x`, evaluated through both dual routes:
    /// `J_A x - J_B R_A x` and `J_{A^{-1}} x + J_{B^{-1}} R_A x`.
    /// The first route is returned; a disagreement beyond 1e-9 signals a
    /// broken operator oracle.
    pub fn displacement(&self, x: &Point) -> Result<Point> {
        let ja = self.op_a.resolvent(x)?;
        let ra = &ja * 2.0 - x;
        let jb = self.op_b.resolvent(&ra)?;
        let route_primal = &ja - &jb;
        let route_dual = (x - &ja) + (&ra - &jb);
        let defect = (&route_primal - &route_dual).norm();
        if defect > 1e-9 * (1.0 + x.norm()) {
            return Err(Error::InternalInconsistency { defect });
        }
        Ok(route_primal)
    }

    /// Iterate `T` from `x0` for `n_steps` steps, capturing the governing
    /// sequence, both shadow sequences, and the consecutive differences.
    pub fn iterate(&self, x0: &Point, n_steps: usize) -> Result<IterationTrace> {
        if n_steps == 0 {
            return Err(Error::InvalidInstance("n_steps must be >= 1".into()));
        }
        if x0.len() != self.dim {
            return Err(Error::dim(self.dim, x0.len()));
        }
        let mut governing = Vec::with_capacity(n_steps + 1);
        let mut shadow_a = Vec::with_capacity(n_steps + 1);
        let mut shadow_a_inv = Vec::with_capacity(n_steps + 1);
        let mut x = x0.clone();
        for step in 0..=n_steps {
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::NumericalBreakdown { step });
            }
            // a resolvent oracle emitting non-finite values mid-run is a
            // breakdown of this trace, not a construction-time failure
            let breakdown = |e: Error| match e {
                Error::Operator(_) => Error::NumericalBreakdown { step },
                other => other,
            };
            let ja = self.op_a.resolvent(&x).map_err(breakdown)?;
            shadow_a.push(ja.clone());
            shadow_a_inv.push(&x - &ja);
            governing.push(x.clone());
            if step < n_steps {
                let ra = &ja * 2.0 - &x;
                let jb = self.op_b.resolvent(&ra).map_err(breakdown)?;
                x = &x - &ja + jb;
            }
        }
        let differences: Vec<Point> = governing.windows(2).map(|w| &w[0] - &w[1]).collect();
        let diff_norms: Vec<f64> = differences.iter().map(|d| d.norm()).collect();
        Ok(IterationTrace {
            governing,
            shadow_a,
            shadow_a_inv,
            differences,
            diff_norms,
            step_count: n_steps,
        })
    }

    /// Pointwise defect of the self-duality `T_{(A,B)} = T_{(A^{-1}, B^{-ov})}`,
    /// where the second pair is built through `invert` and `dual_negate`.
    pub fn self_duality_defect(&self, x: &Point) -> Result<f64> {
        let dual = DrInstance::new(self.op_a.invert(), self.op_b.dual_negate())?;
        Ok((self.apply(x)? - dual.apply(x)?).norm())
    }

    /// Pointwise defect of `T_{(A,B)} = Id - T_{(A, B^{-1})}`.
    pub fn complement_identity_defect(&self, x: &Point) -> Result<f64> {
        let complement = DrInstance::new(self.op_a.clone(), self.op_b.invert())?;
        Ok((self.apply(x)? - (x - complement.apply(x)?)).norm())
    }

    /// Defect of the unconditional graph identity
    ///
    /// `<x - (a + a*), x - Tx - (a - b)>`
    /// `  - <J_A x - a, J_{A^{-1}} x - a*>`
    /// `  - <J_B R_A x - b, J_{B^{-1}} R_A x - (a - a* - b)>`
    /// `  = |x - Tx - (a - b)|^2`,
    ///
    /// which holds for arbitrary 5-tuples. Returns the absolute difference
    /// of the two sides.
    pub fn displacement_identity_defect(&self, t: &GraphTuple) -> Result<f64> {
        let x = &t.x;
        let ja = self.op_a.resolvent(x)?;
        let ja_inv = x - &ja;
        let ra = &ja * 2.0 - x;
        let jb = self.op_b.resolvent(&ra)?;
        let jb_inv = &ra - &jb;
        let disp = &ja - &jb;

        let lhs = (x - (&t.a + &t.a_star)).dot(&(&disp - (&t.a - &t.b)));
        let rhs = (&ja - &t.a).dot(&(&ja_inv - &t.a_star))
            + (&jb - &t.b).dot(&(&jb_inv - (&t.a - &t.a_star - &t.b)));
        let square = (&disp - (&t.a - &t.b)).norm_squared();
        Ok((lhs - rhs - square).abs())
    }

    /// Probe whether `w` belongs to the closure of `ran(Id - T)` by solving
    /// `w = (1 + 1/n^2) x - T x` along the schedule. Each stage is a damped
    /// fixed-point solve of `x = (w + T x) / (1 + 1/n^2)` (a contraction),
    /// warm-started from the previous stage and safeguarded with Anderson
    /// extrapolation so late stages stay affordable.
    pub fn probe_range_membership(
        &self,
        w: &Point,
        params: &ProbeParams,
    ) -> Result<MembershipProbeResult> {
        if w.len() != self.dim {
            return Err(Error::dim(self.dim, w.len()));
        }
        if params.n_schedule.is_empty() {
            return Err(Error::InvalidInstance("empty probe schedule".into()));
        }
        if params.n_schedule.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidInstance(
                "probe schedule must be strictly increasing".into(),
            ));
        }

        let mut iterate_norms = Vec::with_capacity(params.n_schedule.len());
        let mut scaled_norms = Vec::with_capacity(params.n_schedule.len());
        let mut stage_converged = Vec::with_capacity(params.n_schedule.len());
        let mut x = DVector::zeros(self.dim);
        let mut residual_estimate = DVector::zeros(self.dim);

        for &n in &params.n_schedule {
            let nn = (n as f64) * (n as f64);
            let eps = 1.0 / nn;
            let damp = 1.0 / (1.0 + eps);
            let tol =
                (params.inner_tol * eps).max(64.0 * f64::EPSILON * (1.0 + x.norm() + w.norm()));
            let g = |y: &Point| -> Result<Point> { Ok((w + self.apply(y)?) * damp) };
            let converged = accelerated_fixed_point(g, &mut x, tol, params.inner_max)?;
            stage_converged.push(converged);
            let norm = x.norm();
            iterate_norms.push(norm);
            scaled_norms.push(norm * eps);
            residual_estimate = &x * eps;
        }

        let verdict = decide_membership(&scaled_norms, params.abs_tol);
        Ok(MembershipProbeResult {
            n_schedule: params.n_schedule.clone(),
            iterate_norms,
            scaled_norms,
            stage_converged,
            verdict,
            residual_estimate,
        })
    }
}

/// Last scaled norm below `abs_tol` reads as closure membership; the last
/// three stabilizing (pairwise within 1%) above `10 * abs_tol` reads as
/// exclusion. Everything else is inconclusive. Only the membership direction
/// is backed by theory; the exclusion rule is a validated heuristic.
fn decide_membership(scaled: &[f64], abs_tol: f64) -> MembershipVerdict {
    let last = *scaled.last().expect("nonempty schedule");
    if last < abs_tol {
        return MembershipVerdict::InClosure;
    }
    if scaled.len() >= 3 {
        let tail = &scaled[scaled.len() - 3..];
        let stable = tail.iter().all(|&v| v > 10.0 * abs_tol)
            && tail
                .windows(2)
                .all(|p| (p[0] - p[1]).abs() <= 0.01 * p[0].max(p[1]));
        if stable {
            return MembershipVerdict::NotInClosure;
        }
    }
    MembershipVerdict::Inconclusive
}

/// Damped fixed-point solve with safeguarded Anderson extrapolation.
///
/// Plain iteration of a `rho`-contraction with `rho = 1/(1 + 1/n^2)` needs
/// on the order of `n^2` steps per digit, which is not affordable at the
/// schedule tail. The extrapolated candidate is stabilized by one plain step
/// (which strips the fast-mode error the secant model introduces) and
/// accepted only when that improves the fixed-point residual; the plain
/// damped step, with its convergence guarantee, remains the fallback.
fn accelerated_fixed_point<G>(g: G, x: &mut Point, tol: f64, max_evals: usize) -> Result<bool>
where
    G: Fn(&Point) -> Result<Point>,
{
    const MEMORY: usize = 6;
    let dim = x.len();
    let mut hist_x: Vec<Point> = Vec::new();
    let mut hist_g: Vec<Point> = Vec::new();
    let push = |hx: &mut Vec<Point>, hg: &mut Vec<Point>, x: Point, gx: Point| {
        hx.push(x);
        hg.push(gx);
        if hx.len() > MEMORY + 1 {
            hx.remove(0);
            hg.remove(0);
        }
    };
    let mut evals = 0usize;
    let mut rejects = 0usize;

    let mut gx = g(x)?;
    evals += 1;
    loop {
        let res_norm = (&gx - &*x).norm();
        if res_norm <= tol {
            return Ok(true);
        }
        if evals + 3 > max_evals {
            return Ok(false);
        }
        push(&mut hist_x, &mut hist_g, x.clone(), gx.clone());

        let mut advanced = false;
        if hist_x.len() >= 2 {
            if let Some(candidate) = anderson_candidate(dim, &hist_x, &hist_g) {
                let g_cand = g(&candidate)?;
                let stabilized = g_cand.clone();
                let g_stab = g(&stabilized)?;
                evals += 2;
                if (&g_stab - &stabilized).norm() < res_norm {
                    push(&mut hist_x, &mut hist_g, candidate, g_cand);
                    *x = stabilized;
                    gx = g_stab;
                    advanced = true;
                    rejects = 0;
                }
            }
        }
        if !advanced {
            *x = gx.clone();
            gx = g(&*x)?;
            evals += 1;
            rejects += 1;
            if rejects > 12 {
                // stale secant model; restart it from scratch
                hist_x.clear();
                hist_g.clear();
                rejects = 0;
            }
        }
    }
}

/// Type-II Anderson step: minimize `|r_k - dR gamma|` over the residual
/// differences and extrapolate `g_k - dG gamma`.
fn anderson_candidate(dim: usize, hist_x: &[Point], hist_g: &[Point]) -> Option<Point> {
    let m = hist_x.len() - 1;
    let k = hist_x.len() - 1;
    let mut dr = DMatrix::zeros(dim, m);
    let mut dg = DMatrix::zeros(dim, m);
    for j in 0..m {
        let r_next = &hist_g[j + 1] - &hist_x[j + 1];
        let r_prev = &hist_g[j] - &hist_x[j];
        dr.set_column(j, &(r_next - r_prev));
        dg.set_column(j, &(&hist_g[j + 1] - &hist_g[j]));
    }
    let r_k = &hist_g[k] - &hist_x[k];
    let svd = dr.svd(true, true);
    let gamma = svd.solve(&r_k, 1e-13).ok()?;
    let candidate = &hist_g[k] - &dg * &gamma;
    candidate.iter().all(|v| v.is_finite()).then_some(candidate)
}

/// Estimate the minimal displacement vector from a trace via both routes:
/// the consecutive difference `x_N - x_{N+1}` (primary) and the Cesaro
/// average `-x_N / N`. Estimates disagreeing by more than `agree_tol` yield
/// an inconclusive verdict rather than an error.
pub fn estimate_v(trace: &IterationTrace, agree_tol: f64) -> Result<VEstimate> {
    if trace.step_count < 100 {
        return Err(Error::TraceTooShort {
            got: trace.step_count,
            need: 100,
        });
    }
    let n = trace.step_count;
    let difference = trace.differences[n - 1].clone();
    let cesaro = -&trace.governing[n] / (n as f64);
    let gap = (&difference - &cesaro).norm();
    let verdict = if gap <= agree_tol {
        EstimateVerdict::Agree
    } else {
        EstimateVerdict::Inconclusive
    };
    Ok(VEstimate {
        difference,
        cesaro,
        gap,
        verdict,
    })
}

/// Estimate the split vectors `v_R` (from the `J_A` shadow differences) and
/// `v_D` (from the `J_{A^{-1}}` shadow differences). Refuses unless a
/// sufficient condition for `v = v_D + v_R` holds for the instance.
pub fn estimate_split_vectors(inst: &DrInstance, trace: &IterationTrace) -> Result<SplitEstimate> {
    if trace.step_count < 100 {
        return Err(Error::TraceTooShort {
            got: trace.step_count,
            need: 100,
        });
    }
    let pair = ranges::build_range_pair(inst)?;
    let condition = ranges::classify_conditions(inst, &pair);
    if condition == SufficientCondition::NoConditionHolds {
        return Err(Error::NoSufficientCondition(format!(
            "instance ({}, {}) matches no decomposition condition; the split \
             estimators are not certified for it",
            inst.op_a.label(),
            inst.op_b.label()
        )));
    }
    let n = trace.step_count;
    let v_ran = &trace.shadow_a[n - 1] - &trace.shadow_a[n];
    let v_dom = &trace.shadow_a_inv[n - 1] - &trace.shadow_a_inv[n];
    let orth_defect = v_dom.dot(&v_ran).abs();
    let v = estimate_v(trace, f64::INFINITY)?;
    let sum_defect = (&v_dom + &v_ran - &v.difference).norm();
    Ok(SplitEstimate {
        v_dom,
        v_ran,
        orth_defect,
        sum_defect,
        condition,
    })
}
