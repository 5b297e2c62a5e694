//! Brute-force verification: sample-based range clouds, graph-pair matching,
//! and an independent numeric projector. Everything here exists to
//! cross-check the closed forms used elsewhere and is desk-scale only.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sets::{ConvexSet, Point};
use crate::splitting::DrInstance;

/// Where a cloud's points came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudOrigin {
    DisplacementImage,
    GraphMatched,
    GridProjection,
}

/// A finite sample of points in a common dimension.
#[derive(Clone, Debug)]
pub struct SampleCloud {
    pub points: Vec<Point>,
    pub origin: CloudOrigin,
    /// Set when the sampling budget cut the cloud short.
    pub truncated: bool,
}

impl SampleCloud {
    /// CSV export for external plotting: header `w0,...,w{d-1}`, one row
    /// per point.
    pub fn to_csv(&self) -> String {
        let dim = self.points.first().map(|p| p.len()).unwrap_or(0);
        let mut out = String::new();
        out.push_str(
            &(0..dim)
                .map(|i| format!("w{i}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for p in &self.points {
            out.push_str(
                &p.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        out
    }
}

/// Deterministic sampling plan: a dense grid on `[-half_width, half_width]^d`
/// plus seeded Gaussian supplements.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub half_width: f64,
    pub per_axis: usize,
    pub gaussian: usize,
    pub seed: u64,
    pub max_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width: 3.0,
            per_axis: 13,
            gaussian: 60,
            seed: 42,
            max_points: 40_000,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller from two uniforms
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

impl GridSpec {
    /// The sample points, truncated at `max_points`; the flag reports
    /// whether truncation happened.
    pub fn points(&self, dim: usize) -> Result<(Vec<Point>, bool)> {
        if dim > 4 {
            return Err(Error::InvalidInstance(format!(
                "dense grids are limited to dimension <= 4, got {dim}"
            )));
        }
        let mut pts = Vec::new();
        let mut truncated = false;
        let k = self.per_axis.max(2);
        let mut idx = vec![0usize; dim];
        'grid: loop {
            if pts.len() >= self.max_points {
                truncated = true;
                break;
            }
            let p = DVector::from_fn(dim, |i, _| {
                -self.half_width + 2.0 * self.half_width * (idx[i] as f64) / ((k - 1) as f64)
            });
            pts.push(p);
            // odometer increment
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < k {
                    continue 'grid;
                }
                *slot = 0;
            }
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.gaussian {
            if pts.len() >= self.max_points {
                truncated = true;
                break;
            }
            pts.push(DVector::from_fn(dim, |_, _| {
                gaussian(&mut rng) * self.half_width
            }));
        }
        Ok((pts, truncated))
    }
}

/// Image of the displacement map over the sampling plan.
pub fn sample_displacement_image(inst: &DrInstance, grid: &GridSpec) -> Result<SampleCloud> {
    let (xs, truncated) = grid.points(inst.dim())?;
    let mut points = Vec::with_capacity(xs.len());
    for x in &xs {
        points.push(inst.displacement(x)?);
    }
    Ok(SampleCloud {
        points,
        origin: CloudOrigin::DisplacementImage,
        truncated,
    })
}

/// Graph-matched displacement candidates together with their reproduction
/// defects `|(x - Tx) - w|` at `x = a + a*`.
#[derive(Clone, Debug)]
pub struct MatchedPairs {
    pub cloud: SampleCloud,
    pub reproduction_defects: Vec<f64>,
}

/// Sample graph points of both operators through the Minty parametrization
/// and match pairs solving `a - b = a* + b*` within `match_tol` (default
/// `1e-3` times the sample scale). Every matched value `w = a - b` is also
/// re-evaluated as `x - Tx` at `x = a + a*`; for orthogonal instances the
/// reproduction is exact up to the matching defect.
pub fn match_graph_pairs(
    inst: &DrInstance,
    grid: &GridSpec,
    match_tol: Option<f64>,
) -> Result<MatchedPairs> {
    let (xs, truncated) = grid.points(inst.dim())?;
    let graph_a: Vec<_> = xs
        .iter()
        .map(|x| inst.op_a().minty_graph_point(x))
        .collect::<Result<_>>()?;
    let graph_b: Vec<_> = xs
        .iter()
        .map(|x| inst.op_b().minty_graph_point(x))
        .collect::<Result<_>>()?;
    let scale = xs.iter().map(|x| x.norm()).fold(1.0_f64, f64::max);
    let tol = match_tol.unwrap_or(1e-3 * scale);

    let mut points = Vec::new();
    let mut reproduction_defects = Vec::new();
    for ga in &graph_a {
        for gb in &graph_b {
            let w = &ga.primal - &gb.primal;
            let dual_sum = &ga.dual + &gb.dual;
            if (&w - &dual_sum).norm() <= tol {
                let x = &ga.primal + &ga.dual;
                let defect = (inst.displacement(&x)? - &w).norm();
                points.push(w);
                reproduction_defects.push(defect);
            }
        }
    }
    Ok(MatchedPairs {
        cloud: SampleCloud {
            points,
            origin: CloudOrigin::GraphMatched,
            truncated,
        },
        reproduction_defects,
    })
}

/// Nearest point of a cloud.
pub fn numeric_project_cloud(cloud: &SampleCloud, x: &Point) -> Result<Point> {
    cloud
        .points
        .iter()
        .min_by(|a, b| {
            let da = (*a - x).norm();
            let db = (*b - x).norm();
            da.partial_cmp(&db).expect("finite distances")
        })
        .cloned()
        .ok_or_else(|| Error::InvalidInstance("empty sample cloud".into()))
}

/// Deterministic members of a set: projections of a seeded scatter.
pub fn sample_members(set: &ConvexSet, n: usize, seed: u64) -> Vec<Point> {
    let dim = set.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let raw = DVector::from_fn(dim, |_, _| rng.random_range(-10.0..10.0));
            set.project(&raw).expect("dims agree")
        })
        .collect()
}

// ---- independent numeric projection ---------------------------------------

/// One scalar constraint `c(v) (= / <=) 0` with its gradient.
type ConstraintFn = Box<dyn Fn(&DVector<f64>) -> (f64, DVector<f64>)>;

struct Constraint {
    eval: ConstraintFn,
}

struct ProjectionProblem {
    n_vars: usize,
    target: DVector<f64>,
    eqs: Vec<Constraint>,
    ineqs: Vec<Constraint>,
}

/// Projection of `x` onto the set, computed by an augmented-Lagrangian
/// solve of `min 0.5 |y - x|^2` over the set's defining constraints. This
/// never calls the closed-form projection of the variant being checked; it
/// exists precisely to certify those formulas.
pub fn numeric_project_set(set: &ConvexSet, x: &Point) -> Result<Point> {
    if x.len() != set.dim() {
        return Err(Error::dim(set.dim(), x.len()));
    }
    match set {
        ConvexSet::WholeSpace { .. } => return Ok(x.clone()),
        ConvexSet::Singleton { point } => return Ok(point.clone()),
        ConvexSet::Shifted { base, shift } => {
            return Ok(numeric_project_set(base, &(x - shift))? + shift);
        }
        _ => {}
    }
    let problem = build_problem(set, x);
    let sol = augmented_lagrangian(&problem);
    Ok(sol.rows(0, x.len()).clone_owned())
}

fn build_problem(set: &ConvexSet, x: &Point) -> ProjectionProblem {
    let dim = x.len();
    let mut eqs: Vec<Constraint> = Vec::new();
    let mut ineqs: Vec<Constraint> = Vec::new();
    let mut n_vars = dim;
    match set {
        ConvexSet::Ball { center, radius } => {
            let c = center.clone();
            let r2 = radius * radius;
            ineqs.push(Constraint {
                eval: Box::new(move |v| {
                    let y = v.rows(0, c.len()).clone_owned();
                    let d = &y - &c;
                    (d.norm_squared() - r2, {
                        let mut g = DVector::zeros(v.len());
                        g.rows_mut(0, c.len()).copy_from(&(d * 2.0));
                        g
                    })
                }),
            });
        }
        ConvexSet::AffineSubspace { anchor, basis } => {
            // residual orthogonal to the directions: one linear equality per
            // complement direction
            let complement = crate::linalg::orthonormal_complement(dim, basis);
            for j in 0..complement.ncols() {
                let nvec = complement.column(j).clone_owned();
                let a = anchor.clone();
                eqs.push(Constraint {
                    eval: Box::new(move |v| {
                        let y = v.rows(0, a.len()).clone_owned();
                        let val = nvec.dot(&(&y - &a));
                        let mut g = DVector::zeros(v.len());
                        g.rows_mut(0, a.len()).copy_from(&nvec);
                        (val, g)
                    }),
                });
            }
        }
        ConvexSet::Box { lower, upper } => {
            for i in 0..dim {
                if lower[i].is_finite() {
                    let (lo, idx) = (lower[i], i);
                    ineqs.push(Constraint {
                        eval: Box::new(move |v| {
                            let mut g = DVector::zeros(v.len());
                            g[idx] = -1.0;
                            (lo - v[idx], g)
                        }),
                    });
                }
                if upper[i].is_finite() {
                    let (hi, idx) = (upper[i], i);
                    ineqs.push(Constraint {
                        eval: Box::new(move |v| {
                            let mut g = DVector::zeros(v.len());
                            g[idx] = 1.0;
                            (v[idx] - hi, g)
                        }),
                    });
                }
            }
        }
        ConvexSet::Ray { direction } => {
            let d = direction.clone();
            let complement = crate::linalg::orthonormal_complement(
                dim,
                &nalgebra::DMatrix::from_fn(dim, 1, |i, _| d[i]),
            );
            for j in 0..complement.ncols() {
                let nvec = complement.column(j).clone_owned();
                eqs.push(Constraint {
                    eval: Box::new(move |v| {
                        let y = v.rows(0, nvec.len()).clone_owned();
                        let mut g = DVector::zeros(v.len());
                        g.rows_mut(0, nvec.len()).copy_from(&nvec);
                        (nvec.dot(&y), g)
                    }),
                });
            }
            let d2 = direction.clone();
            ineqs.push(Constraint {
                eval: Box::new(move |v| {
                    let y = v.rows(0, d2.len()).clone_owned();
                    let mut g = DVector::zeros(v.len());
                    g.rows_mut(0, d2.len()).copy_from(&(-&d2));
                    (-d2.dot(&y), g)
                }),
            });
        }
        ConvexSet::Halfspace { normal, offset } => {
            let (nv, off) = (normal.clone(), *offset);
            ineqs.push(Constraint {
                eval: Box::new(move |v| {
                    let y = v.rows(0, nv.len()).clone_owned();
                    let mut g = DVector::zeros(v.len());
                    g.rows_mut(0, nv.len()).copy_from(&nv);
                    (nv.dot(&y) - off, g)
                }),
            });
        }
        ConvexSet::Orthant { signs } => {
            for (i, s) in signs.iter().enumerate() {
                let (sign, idx) = (*s as f64, i);
                ineqs.push(Constraint {
                    eval: Box::new(move |v| {
                        let mut g = DVector::zeros(v.len());
                        g[idx] = -sign;
                        (-sign * v[idx], g)
                    }),
                });
            }
        }
        ConvexSet::SumBallSubspace {
            center,
            radius,
            basis,
        } => {
            // variables (y, c): y is the projection candidate, c the ball
            // component; constrain |c - center| <= r and y - c in the span
            n_vars = 2 * dim;
            let (cc, r2) = (center.clone(), radius * radius);
            ineqs.push(Constraint {
                eval: Box::new(move |v| {
                    let c = v.rows(cc.len(), cc.len()).clone_owned();
                    let d = &c - &cc;
                    let mut g = DVector::zeros(v.len());
                    g.rows_mut(cc.len(), cc.len()).copy_from(&(d.clone() * 2.0));
                    (d.norm_squared() - r2, g)
                }),
            });
            let complement = crate::linalg::orthonormal_complement(dim, basis);
            for j in 0..complement.ncols() {
                let nvec = complement.column(j).clone_owned();
                eqs.push(Constraint {
                    eval: Box::new(move |v| {
                        let k = nvec.len();
                        let y = v.rows(0, k).clone_owned();
                        let c = v.rows(k, k).clone_owned();
                        let mut g = DVector::zeros(v.len());
                        g.rows_mut(0, k).copy_from(&nvec);
                        g.rows_mut(k, k).copy_from(&(-&nvec));
                        (nvec.dot(&(&y - &c)), g)
                    }),
                });
            }
        }
        ConvexSet::WholeSpace { .. } | ConvexSet::Singleton { .. } | ConvexSet::Shifted { .. } => {
            unreachable!("handled by the caller")
        }
    }
    ProjectionProblem {
        n_vars,
        target: x.clone(),
        eqs,
        ineqs,
    }
}

/// Augmented-Lagrangian loop with a Barzilai-Borwein inner descent; dense,
/// tiny, test-support quality.
fn augmented_lagrangian(p: &ProjectionProblem) -> DVector<f64> {
    let dim = p.target.len();
    let mut v = DVector::zeros(p.n_vars);
    v.rows_mut(0, dim).copy_from(&p.target);
    if p.n_vars == 2 * dim {
        // start the auxiliary ball variable at the target as well
        let t = p.target.clone();
        v.rows_mut(dim, dim).copy_from(&t);
    }
    let mut lam_eq = vec![0.0; p.eqs.len()];
    let mut lam_in = vec![0.0; p.ineqs.len()];
    let mut mu = 10.0;

    let grad = |v: &DVector<f64>, lam_eq: &[f64], lam_in: &[f64], mu: f64| {
        let mut g = DVector::zeros(v.len());
        let y = v.rows(0, dim).clone_owned();
        g.rows_mut(0, dim).copy_from(&(&y - &p.target));
        for (c, l) in p.eqs.iter().zip(lam_eq) {
            let (val, cg) = (c.eval)(v);
            g += cg * (l + mu * val);
        }
        for (c, l) in p.ineqs.iter().zip(lam_in) {
            let (val, cg) = (c.eval)(v);
            let active = l + mu * val;
            if active > 0.0 {
                g += cg * active;
            }
        }
        g
    };

    for _outer in 0..40 {
        // BB descent on the AL subproblem
        let mut g = grad(&v, &lam_eq, &lam_in, mu);
        let mut step = 1.0 / mu;
        for _inner in 0..2000 {
            if g.norm() <= 1e-12 * (1.0 + v.norm()) {
                break;
            }
            let v_new = &v - &g * step;
            let g_new = grad(&v_new, &lam_eq, &lam_in, mu);
            let s = &v_new - &v;
            let yv = &g_new - &g;
            let sy = s.dot(&yv);
            step = if sy > 1e-300 {
                (s.norm_squared() / sy).clamp(1e-12, 1e3)
            } else {
                step * 0.5
            };
            v = v_new;
            g = g_new;
        }
        // multiplier updates and convergence check
        let mut max_violation = 0.0_f64;
        for (c, l) in p.eqs.iter().zip(lam_eq.iter_mut()) {
            let (val, _) = (c.eval)(&v);
            *l += mu * val;
            max_violation = max_violation.max(val.abs());
        }
        for (c, l) in p.ineqs.iter().zip(lam_in.iter_mut()) {
            let (val, _) = (c.eval)(&v);
            *l = (*l + mu * val).max(0.0);
            max_violation = max_violation.max(val.max(0.0));
        }
        if max_violation <= 1e-11 && g.norm() <= 1e-10 * (1.0 + v.norm()) {
            break;
        }
        mu = (mu * 4.0).min(1e9);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{affine_normal, normal_cone, skew_rotator};
    use crate::splitting::DrInstance;

    fn pt(v: &[f64]) -> Point {
        DVector::from_row_slice(v)
    }

    #[test]
    fn numeric_projection_matches_closed_forms() {
        let sets = vec![
            ConvexSet::ball(pt(&[1.0, -2.0]), 2.5).unwrap(),
            ConvexSet::affine_subspace(pt(&[0.0, 1.0]), &[pt(&[1.0, 0.0])]).unwrap(),
            ConvexSet::hyper_box(pt(&[0.0, f64::NEG_INFINITY]), pt(&[1.0, 2.0])).unwrap(),
            ConvexSet::ray(pt(&[3.0, 4.0])).unwrap(),
            ConvexSet::halfspace(pt(&[1.0, 1.0]), 1.0).unwrap(),
            ConvexSet::orthant(vec![1, -1]).unwrap(),
            ConvexSet::sum_ball_subspace(pt(&[0.0, 0.0]), 1.0, &[pt(&[1.0, 0.0])]).unwrap(),
            ConvexSet::shifted(ConvexSet::ray(pt(&[0.0, 1.0])).unwrap(), pt(&[2.0, 0.0])).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for set in &sets {
            for _ in 0..100 {
                let x = DVector::from_fn(2, |_, _| rng.random_range(-6.0..6.0));
                let closed = set.project(&x).unwrap();
                let numeric = numeric_project_set(set, &x).unwrap();
                assert!(
                    (&closed - &numeric).norm() <= 1e-6,
                    "oracle disagrees on {set:?} at {x:?}: {closed:?} vs {numeric:?}"
                );
            }
        }
    }

    #[test]
    fn ball_cross_check_example() {
        let ball = ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap();
        let p = numeric_project_set(&ball, &pt(&[3.0, 4.0])).unwrap();
        assert!((p - pt(&[0.6, 0.8])).norm() <= 1e-8);
    }

    #[test]
    fn ball_line_sum_projection() {
        // C + U sample geometry: projecting (0,5) onto ball(0,1)+span{e1}
        // lands at (0,1)
        let s = ConvexSet::sum_ball_subspace(pt(&[0.0, 0.0]), 1.0, &[pt(&[1.0, 0.0])]).unwrap();
        let p = numeric_project_set(&s, &pt(&[0.0, 5.0])).unwrap();
        assert!((p - pt(&[0.0, 1.0])).norm() <= 1e-6);
    }

    #[test]
    fn displacement_image_on_the_rotator_line_instance() {
        let a = skew_rotator(1.0, 2, false).unwrap();
        let b = normal_cone(ConvexSet::linear_subspace(2, &[pt(&[1.0, 0.0])]).unwrap());
        let inst = DrInstance::new(a, b).unwrap();
        let cloud = sample_displacement_image(&inst, &GridSpec::default()).unwrap();
        // image lies on the line through J_A u = (.5, -.5)
        let line = ConvexSet::linear_subspace(2, &[pt(&[1.0, -1.0])]).unwrap();
        for w in &cloud.points {
            assert!(line.contains(w, 1e-9).unwrap());
        }
    }

    #[test]
    fn displacement_image_of_identity_instance_is_origin() {
        let a = skew_rotator(1.0, 2, false).unwrap();
        let b = skew_rotator(1.0, 2, true).unwrap();
        let inst = DrInstance::new(a, b).unwrap();
        let cloud = sample_displacement_image(&inst, &GridSpec::default()).unwrap();
        for w in &cloud.points {
            assert!(w.norm() <= 1e-12);
        }
    }

    #[test]
    fn orthogonal_instance_image_is_a_singleton() {
        // U = V = span{e1}, u_perp = (0,1), v_perp = 0, u = (2,0), v = (1,0):
        // the displacement image collapses to (3,1)
        let a = affine_normal(pt(&[2.0, 0.0]), pt(&[0.0, 1.0]), &[pt(&[1.0, 0.0])]).unwrap();
        let b = affine_normal(pt(&[1.0, 0.0]), pt(&[0.0, 0.0]), &[pt(&[1.0, 0.0])]).unwrap();
        let inst = DrInstance::new(a, b).unwrap();
        let cloud = sample_displacement_image(&inst, &GridSpec::default()).unwrap();
        for w in &cloud.points {
            assert!((w - pt(&[3.0, 1.0])).norm() <= 1e-9);
        }

        // graph matching recovers the same point with exact reproduction
        let matched = match_graph_pairs(&inst, &GridSpec::default(), None).unwrap();
        assert!(!matched.cloud.points.is_empty());
        for (w, defect) in matched
            .cloud
            .points
            .iter()
            .zip(&matched.reproduction_defects)
        {
            assert!((w - pt(&[3.0, 1.0])).norm() <= 1e-6);
            assert!(*defect <= 1e-6);
        }
    }

    #[test]
    fn matched_pairs_stay_in_the_domain_difference() {
        let a = normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap());
        let b = normal_cone(ConvexSet::ball(pt(&[4.0, 0.0]), 1.0).unwrap());
        let inst = DrInstance::new(a, b).unwrap();
        let matched = match_graph_pairs(&inst, &GridSpec::default(), None).unwrap();
        let d = ConvexSet::ball(pt(&[-4.0, 0.0]), 2.0).unwrap();
        for w in &matched.cloud.points {
            assert!(d.contains(w, 2e-3).unwrap());
        }
    }

    #[test]
    fn consistent_instance_matches_the_zero_displacement() {
        // fixed points exist, so w = 0 appears among the matched pairs
        let a = normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap());
        let b = normal_cone(ConvexSet::linear_subspace(2, &[pt(&[1.0, 0.0])]).unwrap());
        let inst = DrInstance::new(a, b).unwrap();
        let matched = match_graph_pairs(&inst, &GridSpec::default(), None).unwrap();
        let min_norm = matched
            .cloud
            .points
            .iter()
            .map(|w| w.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(min_norm <= 1e-9);
    }

    #[test]
    fn cloud_projections_recover_frozen_geometry() {
        // members of the domain difference Ball((-4,0),2): nearest to the
        // origin is (-2,0)
        let d = ConvexSet::ball(pt(&[-4.0, 0.0]), 2.0).unwrap();
        let cloud = SampleCloud {
            points: sample_members(&d, 4000, 3),
            origin: CloudOrigin::GridProjection,
            truncated: false,
        };
        let p = numeric_project_cloud(&cloud, &pt(&[0.0, 0.0])).unwrap();
        assert!((p - pt(&[-2.0, 0.0])).norm() <= 1e-2);

        // members of ball + line: nearest to (0,5) is (0,1)
        let s = ConvexSet::sum_ball_subspace(pt(&[0.0, 0.0]), 1.0, &[pt(&[1.0, 0.0])]).unwrap();
        let cloud = SampleCloud {
            points: sample_members(&s, 4000, 5),
            origin: CloudOrigin::GridProjection,
            truncated: false,
        };
        let p = numeric_project_cloud(&cloud, &pt(&[0.0, 5.0])).unwrap();
        assert!((p - pt(&[0.0, 1.0])).norm() <= 1e-2);
    }

    #[test]
    fn clouds_export_as_csv() {
        let cloud = SampleCloud {
            points: vec![pt(&[1.0, 2.0]), pt(&[-0.5, 3.0])],
            origin: CloudOrigin::DisplacementImage,
            truncated: false,
        };
        assert_eq!(cloud.to_csv(), "w0,w1\n1,2\n-0.5,3\n");
    }

    #[test]
    fn cloud_projection_and_guards() {
        let cloud = SampleCloud {
            points: vec![pt(&[0.0, 0.0]), pt(&[-2.0, 0.0]), pt(&[1.0, 1.0])],
            origin: CloudOrigin::GridProjection,
            truncated: false,
        };
        let p = numeric_project_cloud(&cloud, &pt(&[-3.0, 0.1])).unwrap();
        assert_eq!(p, pt(&[-2.0, 0.0]));

        let empty = SampleCloud {
            points: vec![],
            origin: CloudOrigin::GridProjection,
            truncated: false,
        };
        assert!(numeric_project_cloud(&empty, &pt(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn grids_reject_high_dimensions() {
        let spec = GridSpec::default();
        assert!(spec.points(5).is_err());
        let (pts, truncated) = spec.points(2).unwrap();
        assert_eq!(pts.len(), 13 * 13 + 60);
        assert!(!truncated);
    }

    #[test]
    fn grid_budget_flags_truncation() {
        let spec = GridSpec {
            max_points: 10,
            ..GridSpec::default()
        };
        let (pts, truncated) = spec.points(2).unwrap();
        assert_eq!(pts.len(), 10);
        assert!(truncated);
    }
}
