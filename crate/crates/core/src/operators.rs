//! Maximally monotone operators exposed through their resolvent oracles,
//! with a constructor catalog and the operator transforms used by the
//! splitting identities.
//!
//! Resolvents are taken at unit parameter only. The resolvent `J_A` of a
//! maximally monotone `A` is single-valued, firmly nonexpansive, and
//! satisfies `J_A + J_{A^{-1}} = Id`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::orthonormal_complement;
use crate::sets::{ConvexSet, Point};

/// Tri-state flag for 3*-monotonicity (rectangularity). The toolkit has no
/// algorithmic test for a black-box operator; this is catalog metadata.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rectangularity {
    Yes,
    No,
    Unknown,
}

/// A point of the operator graph: `dual` is an element of `A(primal)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphPoint {
    pub primal: Point,
    pub dual: Point,
}

type ResolventFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// A maximally monotone operator given by its resolvent oracle plus
/// descriptor metadata.
#[derive(Clone)]
pub struct MonotoneOp {
    dim: usize,
    resolvent: ResolventFn,
    dom: Option<ConvexSet>,
    ran: Option<ConvexSet>,
    rectangular: Rectangularity,
    label: String,
    /// Set when the operator is a normal cone `N_C`; range-formula routines
    /// key sufficient conditions off this.
    normal_cone_of: Option<ConvexSet>,
}

impl fmt::Debug for MonotoneOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneOp")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("rectangular", &self.rectangular)
            .finish()
    }
}

impl MonotoneOp {
    /// Wrap a raw resolvent oracle. The caller promises the map is the
    /// resolvent of a maximally monotone operator; the invariants module
    /// spot-checks firm nonexpansiveness.
    pub fn from_resolvent<F>(dim: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        MonotoneOp {
            dim,
            resolvent: Arc::new(f),
            dom: None,
            ran: None,
            rectangular: Rectangularity::Unknown,
            label: label.into(),
            normal_cone_of: None,
        }
    }

    pub fn with_dom(mut self, dom: ConvexSet) -> Self {
        self.dom = Some(dom);
        self
    }

    pub fn with_ran(mut self, ran: ConvexSet) -> Self {
        self.ran = Some(ran);
        self
    }

    pub fn with_rectangular(mut self, r: Rectangularity) -> Self {
        self.rectangular = r;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dom(&self) -> Option<&ConvexSet> {
        self.dom.as_ref()
    }

    pub fn ran(&self) -> Option<&ConvexSet> {
        self.ran.as_ref()
    }

    pub fn rectangular(&self) -> Rectangularity {
        self.rectangular
    }

    pub fn normal_cone_of(&self) -> Option<&ConvexSet> {
        self.normal_cone_of.as_ref()
    }

    /// `J_A(x) = (Id + A)^{-1}(x)`.
    pub fn resolvent(&self, x: &Point) -> Result<Point> {
        if x.len() != self.dim {
            return Err(Error::dim(self.dim, x.len()));
        }
        let y = (self.resolvent)(x);
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::Operator(format!(
                "resolvent of {} returned a non-finite value",
                self.label
            )));
        }
        Ok(y)
    }

    /// `R_A(x) = 2 J_A(x) - x`; nonexpansive.
    pub fn reflected_resolvent(&self, x: &Point) -> Result<Point> {
        Ok(self.resolvent(x)? * 2.0 - x)
    }

    /// `x - J_A(x) = J_{A^{-1}}(x)`.
    pub fn inverse_resolvent(&self, x: &Point) -> Result<Point> {
        Ok(x - self.resolvent(x)?)
    }

    /// The operator `A^{-1}`, with resolvent `x - J_A(x)` and swapped
    /// descriptors. Rectangularity is preserved.
    pub fn invert(&self) -> MonotoneOp {
        let inner = self.resolvent.clone();
        MonotoneOp {
            dim: self.dim,
            resolvent: Arc::new(move |x: &Point| x - inner(x)),
            dom: self.ran.clone(),
            ran: self.dom.clone(),
            rectangular: self.rectangular,
            label: format!("inv({})", self.label),
            normal_cone_of: None,
        }
    }

    /// The operator `(-Id) o A^{-1} o (-Id)`, with resolvent
    /// `x + J_A(-x) = -J_{A^{-1}}(-x)`. Rectangularity is preserved.
    pub fn dual_negate(&self) -> MonotoneOp {
        let inner = self.resolvent.clone();
        MonotoneOp {
            dim: self.dim,
            resolvent: Arc::new(move |x: &Point| x + inner(&(-x))),
            dom: self.ran.as_ref().map(|s| s.negate()),
            ran: self.dom.as_ref().map(|s| s.negate()),
            rectangular: self.rectangular,
            label: format!("dualneg({})", self.label),
            normal_cone_of: None,
        }
    }

    /// The graph point `(J_A x, x - J_A x)`, which lies in `gra A` by
    /// Minty's parametrization.
    pub fn minty_graph_point(&self, x: &Point) -> Result<GraphPoint> {
        let primal = self.resolvent(x)?;
        let dual = x - &primal;
        Ok(GraphPoint { primal, dual })
    }
}

// ---- constructor catalog -------------------------------------------------

/// Normal cone operator `N_C`; its resolvent is the projection `P_C`.
/// Subdifferential of an indicator, hence rectangular. The closure of the
/// range is the polar of the recession cone of `C`.
pub fn normal_cone(set: ConvexSet) -> MonotoneOp {
    let dim = set.dim();
    let ran = set
        .recession_cone()
        .polar_cone()
        .expect("recession cones are cones");
    let proj_set = set.clone();
    MonotoneOp {
        dim,
        resolvent: Arc::new(move |x: &Point| {
            proj_set.project(x).expect("dimension checked by caller")
        }),
        dom: Some(set.clone()),
        ran: Some(ran),
        rectangular: Rectangularity::Yes,
        label: format!("N_{}", set.variant_name()),
        normal_cone_of: Some(set),
    }
}

/// Indicator prox: identical to the normal cone operator of the set.
pub fn prox_indicator(set: ConvexSet) -> MonotoneOp {
    normal_cone(set)
}

fn skew_apply(gamma_sqrt: f64, x: &Point) -> Point {
    let mut y = DVector::zeros(x.len());
    for b in 0..x.len() / 2 {
        y[2 * b] = -gamma_sqrt * x[2 * b + 1];
        y[2 * b + 1] = gamma_sqrt * x[2 * b];
    }
    y
}

/// Rotation-like skew operator `S` with `S^2 = -gamma Id`, built from 2x2
/// blocks `[[0, -sqrt(gamma)], [sqrt(gamma), 0]]`. Both `S` and `-S` are
/// maximally monotone, and neither is rectangular. `reversed` selects `-S`.
///
/// The resolvent is `(Id -/+ S) / (1 + gamma)`.
pub fn skew_rotator(gamma: f64, dim: usize, reversed: bool) -> Result<MonotoneOp> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::Construction(format!(
            "skew rotator needs gamma > 0, got {gamma}"
        )));
    }
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::Construction(format!(
            "skew rotator needs a positive even dimension, got {dim}"
        )));
    }
    let gs = gamma.sqrt();
    let scale = 1.0 / (1.0 + gamma);
    let sign = if reversed { -1.0 } else { 1.0 };
    Ok(MonotoneOp {
        dim,
        resolvent: Arc::new(move |x: &Point| (x - skew_apply(gs, x) * sign) * scale),
        dom: Some(ConvexSet::whole_space(dim)),
        ran: Some(ConvexSet::whole_space(dim)),
        rectangular: Rectangularity::No,
        label: format!("{}skew(gamma={gamma})", if reversed { "-" } else { "" }),
        normal_cone_of: None,
    })
}

/// The affine relation `u + N_{u_perp + U}` for a linear subspace `U`,
/// `u` in `U`, and `u_perp` in the orthogonal complement. Its resolvent is
/// `x -> P_{u_perp + U}(x - u)`; domain and range are the affine subspaces
/// `u_perp + U` and `u + U_perp`.
pub fn affine_normal(u: Point, u_perp: Point, directions: &[Point]) -> Result<MonotoneOp> {
    let dim = u.len();
    if u_perp.len() != dim {
        return Err(Error::dim(dim, u_perp.len()));
    }
    let dom_set = ConvexSet::affine_subspace(u_perp.clone(), directions)?;
    let basis = match &dom_set {
        ConvexSet::AffineSubspace { basis, .. } => basis.clone(),
        ConvexSet::Singleton { .. } => DMatrix::zeros(dim, 0),
        ConvexSet::WholeSpace { .. } => DMatrix::identity(dim, dim),
        _ => unreachable!(),
    };
    // validate u in U and u_perp in the complement
    let u_in_span = &basis * (basis.transpose() * &u);
    if (&u - u_in_span).norm() > 1e-9 {
        return Err(Error::Construction(
            "affine_normal: u must lie in the direction subspace".into(),
        ));
    }
    if (basis.transpose() * &u_perp).norm() > 1e-9 {
        return Err(Error::Construction(
            "affine_normal: u_perp must be orthogonal to the direction subspace".into(),
        ));
    }
    let complement = orthonormal_complement(dim, &basis);
    let ran_set = ConvexSet::AffineSubspace {
        anchor: u.clone(),
        basis: complement,
    }
    .canonical();
    let proj_set = dom_set.clone();
    let shift = u.clone();
    Ok(MonotoneOp {
        dim,
        resolvent: Arc::new(move |x: &Point| {
            proj_set
                .project(&(x - &shift))
                .expect("dimension checked by caller")
        }),
        dom: Some(dom_set),
        ran: Some(ran_set),
        rectangular: Rectangularity::Yes,
        label: "affine_normal".into(),
        normal_cone_of: None,
    })
}

/// Monotone linear operator `x -> M x` with `M + M^T` positive semidefinite.
/// The resolvent solves `(I + M) y = x` through an LU factorization cached at
/// construction.
pub fn psd_linear(m: DMatrix<f64>) -> Result<MonotoneOp> {
    let dim = m.nrows();
    if m.ncols() != dim {
        return Err(Error::dim(dim, m.ncols()));
    }
    let sym = (&m + m.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    if eig.eigenvalues.iter().any(|&v| v < -1e-9 * scale) {
        return Err(Error::Construction(
            "psd_linear: M + M^T must be positive semidefinite".into(),
        ));
    }
    let system = DMatrix::identity(dim, dim) + &m;
    let lu = system.lu();
    if lu.determinant().abs() < 1e-300 {
        return Err(Error::Construction(
            "psd_linear: I + M is numerically singular".into(),
        ));
    }
    // closure of the range of M, via SVD rank detection
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 1e-12 * smax.max(1.0))
        .map(|(j, _)| svd.u.as_ref().unwrap().column(j).clone_owned())
        .collect();
    let ran = ConvexSet::linear_subspace(dim, &cols)?;
    let skew_norm = (&sym - &m).norm();
    let rect = if (&m - m.transpose()).norm() <= 1e-12 * (1.0 + m.norm()) {
        Rectangularity::Yes
    } else if skew_norm > 0.0 && sym.norm() <= 1e-12 * skew_norm {
        Rectangularity::No
    } else {
        Rectangularity::Unknown
    };
    Ok(MonotoneOp {
        dim,
        resolvent: Arc::new(move |x: &Point| {
            lu.solve(x).expect("factorization verified nonsingular")
        }),
        dom: Some(ConvexSet::whole_space(dim)),
        ran: Some(ran),
        rectangular: rect,
        label: "psd_linear".into(),
        normal_cone_of: None,
    })
}

/// Subdifferential of `x -> 0.5 |x - center|^2`; prox is the midpoint map
/// `(x + center) / 2`.
pub fn prox_quadratic(center: Point) -> MonotoneOp {
    let dim = center.len();
    MonotoneOp {
        dim,
        resolvent: Arc::new(move |x: &Point| (x + &center) * 0.5),
        dom: Some(ConvexSet::whole_space(dim)),
        ran: Some(ConvexSet::whole_space(dim)),
        rectangular: Rectangularity::Yes,
        label: "prox_quadratic".into(),
        normal_cone_of: None,
    }
}

/// Subdifferential of the weighted l1 norm; prox is soft thresholding.
/// The range closure is the box `[-weight, weight]^d`.
pub fn prox_l1(weight: f64, dim: usize) -> Result<MonotoneOp> {
    if weight <= 0.0 || !weight.is_finite() {
        return Err(Error::Construction(format!(
            "l1 weight must be positive, got {weight}"
        )));
    }
    let ran = ConvexSet::hyper_box(
        DVector::from_element(dim, -weight),
        DVector::from_element(dim, weight),
    )?;
    Ok(MonotoneOp {
        dim,
        resolvent: Arc::new(move |x: &Point| {
            DVector::from_fn(x.len(), |i, _| {
                let v = x[i];
                if v > weight {
                    v - weight
                } else if v < -weight {
                    v + weight
                } else {
                    0.0
                }
            })
        }),
        dom: Some(ConvexSet::whole_space(dim)),
        ran: Some(ran),
        rectangular: Rectangularity::Yes,
        label: format!("prox_l1(w={weight})"),
        normal_cone_of: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(v: &[f64]) -> Point {
        DVector::from_row_slice(v)
    }

    #[test]
    fn normal_cone_resolvent_is_projection() {
        let op = normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap());
        let y = op.resolvent(&pt(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(y[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(y[1], 0.8, epsilon = 1e-15);
        assert_eq!(op.rectangular(), Rectangularity::Yes);
        assert!(op.ran().unwrap().is_whole_space()); // bounded domain
    }

    #[test]
    fn skew_rotator_closed_forms() {
        let op = skew_rotator(1.0, 2, false).unwrap();
        let y = op.resolvent(&pt(&[1.0, 0.0])).unwrap();
        assert_eq!(y, pt(&[0.5, -0.5]));
        let r = op.reflected_resolvent(&pt(&[1.0, 0.0])).unwrap();
        assert_eq!(r, pt(&[0.0, -1.0])); // R_A = -S at gamma = 1
        let inv = op.inverse_resolvent(&pt(&[1.0, 0.0])).unwrap();
        assert_eq!(inv, pt(&[0.5, 0.5]));
        assert_eq!(op.rectangular(), Rectangularity::No);

        assert!(skew_rotator(1.0, 3, false).is_err());
        assert!(skew_rotator(-2.0, 2, false).is_err());
    }

    #[test]
    fn quadratic_prox_is_midpoint() {
        let op = prox_quadratic(pt(&[2.0, 0.0]));
        assert_eq!(op.resolvent(&pt(&[0.0, 0.0])).unwrap(), pt(&[1.0, 0.0]));
    }

    #[test]
    fn reflected_and_inverse_on_ball() {
        let op = normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap());
        let r = op.reflected_resolvent(&pt(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(r[0], -1.8, epsilon = 1e-14);
        assert_relative_eq!(r[1], -2.4, epsilon = 1e-14);
        let i = op.inverse_resolvent(&pt(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(i[0], 2.4, epsilon = 1e-14);
        assert_relative_eq!(i[1], 3.2, epsilon = 1e-14);

        // the whole space makes R the identity
        let free = normal_cone(ConvexSet::whole_space(2));
        assert_eq!(
            free.reflected_resolvent(&pt(&[3.0, -2.0])).unwrap(),
            pt(&[3.0, -2.0])
        );
        // shifted ball: resolvent at the origin is the nearest boundary point
        let shifted = normal_cone(ConvexSet::ball(pt(&[4.0, 0.0]), 1.0).unwrap());
        assert_eq!(
            shifted.resolvent(&pt(&[0.0, 0.0])).unwrap(),
            pt(&[3.0, 0.0])
        );
    }

    #[test]
    fn invert_swaps_roles() {
        let u = ConvexSet::linear_subspace(2, &[pt(&[1.0, 0.0])]).unwrap();
        let op = normal_cone(u);
        let inv = op.invert();
        // resolvent of the inverse is the complement projection
        let y = inv.resolvent(&pt(&[3.0, 4.0])).unwrap();
        assert_eq!(y, pt(&[0.0, 4.0]));
        // double inversion returns to the original pointwise
        let opi2 = inv.invert();
        for k in 0..100 {
            let x = pt(&[(k as f64) * 0.13 - 6.0, (k as f64) * 0.29 - 14.0]);
            let a = op.resolvent(&x).unwrap();
            let b = opi2.resolvent(&x).unwrap();
            assert!((a - b).norm() <= 1e-14);
        }
        // quadratic with center 0: inverse resolvent halves once more
        let q = prox_quadratic(pt(&[0.0, 0.0]));
        assert_eq!(
            q.invert().resolvent(&pt(&[2.0, 0.0])).unwrap(),
            pt(&[1.0, 0.0])
        );
    }

    #[test]
    fn dual_negate_closed_forms() {
        let u = ConvexSet::linear_subspace(2, &[pt(&[1.0, 0.0])]).unwrap();
        let op = normal_cone(u);
        let dn = op.dual_negate();
        // for a linear subspace the negations cancel: resolvent is P_{U_perp}
        let y = dn.resolvent(&pt(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(y[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(y[1], 4.0, epsilon = 1e-14);
        // applying twice recovers the original resolvent
        let dd = dn.dual_negate();
        for k in 0..50 {
            let x = pt(&[(k as f64) * 0.41 - 10.0, (k as f64) * 0.17 - 4.0]);
            assert!((op.resolvent(&x).unwrap() - dd.resolvent(&x).unwrap()).norm() <= 1e-13);
        }
        // skew rotator: J of the dual-negated operator is (gamma Id + S)/(1+gamma)
        for gamma in [1.0, 2.0] {
            let s = skew_rotator(gamma, 2, false).unwrap();
            let sdn = s.dual_negate();
            for k in 0..20 {
                let x = pt(&[(k as f64) * 0.7 - 7.0, (k as f64) * 0.3 - 3.0]);
                let got = sdn.resolvent(&x).unwrap();
                let want = (&x * gamma + skew_apply(gamma.sqrt(), &x)) / (1.0 + gamma);
                assert!((got - want).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn minty_graph_points() {
        let op = normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap());
        let g = op.minty_graph_point(&pt(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(g.primal[0], 0.6, epsilon = 1e-14);
        assert_relative_eq!(g.primal[1], 0.8, epsilon = 1e-14);
        // the dual is the outward normal ray direction: 4 * primal here
        assert!((&g.dual - &g.primal * 4.0).norm() <= 1e-12);
        assert!((&g.primal + &g.dual - pt(&[3.0, 4.0])).norm() <= 1e-15);

        let line = normal_cone(ConvexSet::linear_subspace(2, &[pt(&[1.0, 0.0])]).unwrap());
        let g = line.minty_graph_point(&pt(&[3.0, 4.0])).unwrap();
        assert_eq!(g.primal, pt(&[3.0, 0.0]));
        assert_eq!(g.dual, pt(&[0.0, 4.0]));
    }

    #[test]
    fn affine_normal_resolvent_formula() {
        // A = u + N_{u_perp + U}, resolvent x -> P_{u_perp + U}(x - u)
        let u = pt(&[1.0, 0.0]);
        let u_perp = pt(&[0.0, 1.0]);
        let op = affine_normal(u.clone(), u_perp.clone(), &[pt(&[1.0, 0.0])]).unwrap();
        let target = ConvexSet::affine_subspace(u_perp, &[pt(&[1.0, 0.0])]).unwrap();
        for k in 0..50 {
            let x = pt(&[(k as f64) * 0.3 - 7.0, (k as f64) * 0.11 - 2.0]);
            let y = op.resolvent(&x).unwrap();
            let want = target.project(&(&x - &u)).unwrap();
            assert!((&y - &want).norm() <= 1e-13);
            // graph check: x - y - u must be a normal vector of the affine
            // subspace at y, i.e. orthogonal to the direction space
            let n = &x - &y - &u;
            assert!(n[0].abs() <= 1e-12);
            assert!(target.contains(&y, 1e-12).unwrap());
        }
        // descriptor catalog from the construction
        assert!(op.dom().unwrap().is_strict_affine());
        assert!(op.ran().unwrap().is_strict_affine());

        assert!(affine_normal(pt(&[0.0, 1.0]), pt(&[0.0, 0.0]), &[pt(&[1.0, 0.0])]).is_err());
    }

    #[test]
    fn psd_linear_solves_cached_system() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let op = psd_linear(m).unwrap();
        let y = op.resolvent(&pt(&[3.0, 5.0])).unwrap();
        assert_relative_eq!(y[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(y[1], 5.0, epsilon = 1e-14);
        assert_eq!(op.rectangular(), Rectangularity::Yes);
        // range of M is span{e1}
        let ran = op.ran().unwrap();
        assert!(ran.contains(&pt(&[2.0, 0.0]), 1e-9).unwrap());
        assert!(!ran.contains(&pt(&[0.0, 1.0]), 1e-6).unwrap());

        let bad = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        assert!(psd_linear(bad).is_err());
    }

    #[test]
    fn l1_prox_soft_thresholds() {
        let op = prox_l1(1.0, 2).unwrap();
        let y = op.resolvent(&pt(&[2.5, -0.3])).unwrap();
        assert_eq!(y, pt(&[1.5, 0.0]));
    }

    #[test]
    fn resolvent_identity_on_catalog() {
        // J_A + J_{A^{-1}} = Id for a few representatives
        let ops = vec![
            normal_cone(ConvexSet::ball(pt(&[1.0, -2.0]), 3.0).unwrap()),
            skew_rotator(2.5, 2, false).unwrap(),
            prox_l1(0.7, 2).unwrap(),
            prox_quadratic(pt(&[0.4, 0.9])),
        ];
        for op in &ops {
            for k in 0..200 {
                let x = pt(&[(k as f64) * 0.123 - 12.0, (k as f64) * 0.071 - 7.0]);
                let lhs = op.resolvent(&x).unwrap() + op.inverse_resolvent(&x).unwrap();
                assert!(
                    (lhs - &x).norm() <= 1e-12,
                    "identity failed for {}",
                    op.label()
                );
            }
        }
    }
}
