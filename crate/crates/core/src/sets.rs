//! Catalog of closed convex sets with exact projections, recession cones,
//! and polar cones.
//!
//! Every variant is closed by construction; there are no open or
//! relative-interior variants. Box bounds may be `+/-inf`, which is how
//! half-lines, coordinate subspaces, and generalized orthants are expressed
//! without extra variants.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, orthonormal_complement, span_project, ORTHO_DROP_TOL};

/// A vector in `R^d`, standing in for an element of the ambient space.
pub type Point = DVector<f64>;

/// A closed convex set with exact projection, recession-cone, and polar-cone
/// oracles.
#[derive(Clone, Debug)]
pub enum ConvexSet {
    /// The whole space `R^d`.
    WholeSpace { dim: usize },
    /// A single point.
    Singleton { point: Point },
    /// Closed ball `{x : |x - center| <= radius}`, `radius > 0`.
    Ball { center: Point, radius: f64 },
    /// Affine subspace `anchor + span(basis)`; basis columns orthonormal.
    AffineSubspace { anchor: Point, basis: DMatrix<f64> },
    /// Axis-aligned box; entries of `lower`/`upper` may be `+/-inf`.
    Box {
        lower: DVector<f64>,
        upper: DVector<f64>,
    },
    /// Half-line `{t * direction : t >= 0}` through the origin; `direction` is unit.
    Ray { direction: Point },
    /// `{x : <normal, x> <= offset}`; `normal` is unit.
    Halfspace { normal: Point, offset: f64 },
    /// `{x : sign_i * x_i >= 0}` with `sign_i` in `{-1, +1}`.
    Orthant { signs: Vec<i8> },
    /// Minkowski sum of a ball and a linear subspace (basis orthonormal).
    SumBallSubspace {
        center: Point,
        radius: f64,
        basis: DMatrix<f64>,
    },
    /// `base + shift`, for variants that do not absorb translations.
    Shifted { base: Box<ConvexSet>, shift: Point },
}

fn check_dim(expected: usize, x: &Point) -> Result<()> {
    if x.len() != expected {
        return Err(Error::dim(expected, x.len()));
    }
    Ok(())
}

fn all_finite(x: &Point) -> bool {
    x.iter().all(|v| v.is_finite())
}

impl ConvexSet {
    // ---- constructors -------------------------------------------------

    pub fn whole_space(dim: usize) -> Self {
        ConvexSet::WholeSpace { dim }
    }

    pub fn singleton(point: Point) -> Result<Self> {
        if !all_finite(&point) {
            return Err(Error::Construction("singleton point must be finite".into()));
        }
        Ok(ConvexSet::Singleton { point })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::Construction(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        if !all_finite(&center) {
            return Err(Error::Construction("ball center must be finite".into()));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    /// Affine subspace through `anchor` spanned by `directions`. The
    /// directions are orthonormalized by Gram-Schmidt; near-dependent
    /// columns are dropped at tolerance 1e-12.
    pub fn affine_subspace(anchor: Point, directions: &[Point]) -> Result<Self> {
        let dim = anchor.len();
        for d in directions {
            check_dim(dim, d)?;
        }
        if !all_finite(&anchor) {
            return Err(Error::Construction("subspace anchor must be finite".into()));
        }
        let basis = gram_schmidt(dim, directions, ORTHO_DROP_TOL);
        Ok(ConvexSet::AffineSubspace { anchor, basis }.canonical())
    }

    /// Linear subspace (affine subspace through the origin).
    pub fn linear_subspace(dim: usize, directions: &[Point]) -> Result<Self> {
        Self::affine_subspace(DVector::zeros(dim), directions)
    }

    pub fn hyper_box(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::dim(lower.len(), upper.len()));
        }
        for i in 0..lower.len() {
            if lower[i].is_nan() || upper[i].is_nan() || lower[i] > upper[i] {
                return Err(Error::Construction(format!(
                    "box axis {i} invalid: [{}, {}]",
                    lower[i], upper[i]
                )));
            }
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    pub fn ray(direction: Point) -> Result<Self> {
        let n = direction.norm();
        if n <= ORTHO_DROP_TOL || !n.is_finite() {
            return Err(Error::Construction("ray direction must be nonzero".into()));
        }
        Ok(ConvexSet::Ray {
            direction: direction / n,
        })
    }

    pub fn halfspace(normal: Point, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if n <= ORTHO_DROP_TOL || !n.is_finite() || !offset.is_finite() {
            return Err(Error::Construction(
                "halfspace needs a nonzero normal and finite offset".into(),
            ));
        }
        Ok(ConvexSet::Halfspace {
            normal: normal / n,
            offset: offset / n,
        })
    }

    pub fn orthant(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::Construction(
                "orthant signs must be +1 or -1; use a box for pinned or free axes".into(),
            ));
        }
        Ok(ConvexSet::Orthant { signs })
    }

    pub fn sum_ball_subspace(center: Point, radius: f64, directions: &[Point]) -> Result<Self> {
        let dim = center.len();
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::Construction(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        for d in directions {
            check_dim(dim, d)?;
        }
        let basis = gram_schmidt(dim, directions, ORTHO_DROP_TOL);
        Ok(ConvexSet::SumBallSubspace {
            center,
            radius,
            basis,
        }
        .canonical())
    }

    pub fn shifted(base: ConvexSet, shift: Point) -> Result<Self> {
        check_dim(base.dim(), &shift)?;
        Ok(base.translate(&shift))
    }

    // ---- basic queries -------------------------------------------------

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::WholeSpace { dim } => *dim,
            ConvexSet::Singleton { point } => point.len(),
            ConvexSet::Ball { center, .. } => center.len(),
            ConvexSet::AffineSubspace { anchor, .. } => anchor.len(),
            ConvexSet::Box { lower, .. } => lower.len(),
            ConvexSet::Ray { direction } => direction.len(),
            ConvexSet::Halfspace { normal, .. } => normal.len(),
            ConvexSet::Orthant { signs } => signs.len(),
            ConvexSet::SumBallSubspace { center, .. } => center.len(),
            ConvexSet::Shifted { base, .. } => base.dim(),
        }
    }

    /// Nearest point of the set to `x`.
    pub fn project(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x)?;
        Ok(self.project_unchecked(x))
    }

    fn project_unchecked(&self, x: &Point) -> Point {
        match self {
            ConvexSet::WholeSpace { .. } => x.clone(),
            ConvexSet::Singleton { point } => point.clone(),
            ConvexSet::Ball { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center + d * (*radius / n)
                }
            }
            ConvexSet::AffineSubspace { anchor, basis } => {
                anchor + span_project(basis, &(x - anchor))
            }
            ConvexSet::Box { lower, upper } => {
                DVector::from_fn(x.len(), |i, _| x[i].clamp(lower[i], upper[i]))
            }
            ConvexSet::Ray { direction } => {
                let t = direction.dot(x).max(0.0);
                direction * t
            }
            ConvexSet::Halfspace { normal, offset } => {
                let slack = normal.dot(x) - offset;
                if slack <= 0.0 {
                    x.clone()
                } else {
                    x - normal * slack
                }
            }
            ConvexSet::Orthant { signs } => DVector::from_fn(x.len(), |i, _| {
                if signs[i] > 0 {
                    x[i].max(0.0)
                } else {
                    x[i].min(0.0)
                }
            }),
            ConvexSet::SumBallSubspace {
                center,
                radius,
                basis,
            } => {
                // Split x - center along the subspace and its complement; the
                // subspace absorbs its component, the ball handles the rest.
                let in_span = span_project(basis, x);
                let resid = x - center;
                let resid_perp = &resid - span_project(basis, &resid);
                let n = resid_perp.norm();
                let ball_part = if n <= *radius {
                    resid_perp
                } else {
                    resid_perp * (*radius / n)
                };
                in_span + (center - span_project(basis, center)) + ball_part
            }
            ConvexSet::Shifted { base, shift } => base.project_unchecked(&(x - shift)) + shift,
        }
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: &Point) -> Result<f64> {
        Ok((x - self.project(x)?).norm())
    }

    /// Membership at tolerance `tol` (distance test).
    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }

    // ---- cones ---------------------------------------------------------

    /// Directions `d` with `set + t*d` contained in the set for all `t >= 0`.
    pub fn recession_cone(&self) -> ConvexSet {
        let dim = self.dim();
        match self {
            ConvexSet::WholeSpace { .. } => self.clone(),
            ConvexSet::Singleton { .. } | ConvexSet::Ball { .. } => ConvexSet::Singleton {
                point: DVector::zeros(dim),
            },
            ConvexSet::AffineSubspace { basis, .. } => ConvexSet::AffineSubspace {
                anchor: DVector::zeros(dim),
                basis: basis.clone(),
            }
            .canonical(),
            ConvexSet::Box { lower, upper } => {
                let l = DVector::from_fn(dim, |i, _| {
                    if lower[i].is_infinite() {
                        f64::NEG_INFINITY
                    } else {
                        0.0
                    }
                });
                let u = DVector::from_fn(dim, |i, _| {
                    if upper[i].is_infinite() {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                });
                ConvexSet::Box { lower: l, upper: u }.canonical()
            }
            ConvexSet::Ray { .. } | ConvexSet::Orthant { .. } => self.clone(),
            ConvexSet::Halfspace { normal, .. } => ConvexSet::Halfspace {
                normal: normal.clone(),
                offset: 0.0,
            },
            ConvexSet::SumBallSubspace { basis, .. } => ConvexSet::AffineSubspace {
                anchor: DVector::zeros(dim),
                basis: basis.clone(),
            }
            .canonical(),
            ConvexSet::Shifted { base, .. } => base.recession_cone(),
        }
    }

    /// Whether the set is a cone (structurally).
    pub fn is_cone(&self) -> bool {
        match self {
            ConvexSet::WholeSpace { .. } | ConvexSet::Ray { .. } | ConvexSet::Orthant { .. } => {
                true
            }
            ConvexSet::Singleton { point } => point.norm() == 0.0,
            ConvexSet::Ball { .. } | ConvexSet::SumBallSubspace { .. } => false,
            ConvexSet::AffineSubspace { anchor, basis } => {
                (anchor - span_project(basis, anchor)).norm() <= 1e-12
            }
            ConvexSet::Box { lower, upper } => (0..lower.len()).all(|i| {
                (lower[i] == 0.0 || lower[i] == f64::NEG_INFINITY)
                    && (upper[i] == 0.0 || upper[i] == f64::INFINITY)
            }),
            ConvexSet::Halfspace { offset, .. } => offset.abs() <= 1e-12,
            ConvexSet::Shifted { .. } => false,
        }
    }

    /// Polar cone `{u : <u, k> <= 0 for all k in the cone}`.
    pub fn polar_cone(&self) -> Result<ConvexSet> {
        if !self.is_cone() {
            return Err(Error::NotACone(self.variant_name().into()));
        }
        let dim = self.dim();
        Ok(match self {
            ConvexSet::WholeSpace { .. } => ConvexSet::Singleton {
                point: DVector::zeros(dim),
            },
            ConvexSet::Singleton { .. } => ConvexSet::WholeSpace { dim },
            ConvexSet::AffineSubspace { basis, .. } => ConvexSet::AffineSubspace {
                anchor: DVector::zeros(dim),
                basis: orthonormal_complement(dim, basis),
            }
            .canonical(),
            ConvexSet::Ray { direction } => ConvexSet::Halfspace {
                normal: direction.clone(),
                offset: 0.0,
            },
            ConvexSet::Halfspace { normal, .. } => ConvexSet::Ray {
                direction: normal.clone(),
            },
            ConvexSet::Orthant { signs } => ConvexSet::Orthant {
                signs: signs.iter().map(|s| -s).collect(),
            },
            ConvexSet::Box { lower, upper } => {
                // per axis: [0,inf) -> (-inf,0], (-inf,0] -> [0,inf),
                //           R -> {0},          {0} -> R
                let mut l = DVector::zeros(dim);
                let mut u = DVector::zeros(dim);
                for i in 0..dim {
                    let unbounded_up = upper[i] == f64::INFINITY;
                    let unbounded_down = lower[i] == f64::NEG_INFINITY;
                    match (unbounded_down, unbounded_up) {
                        (true, true) => {} // free axis -> pinned to 0
                        (false, true) => {
                            l[i] = f64::NEG_INFINITY;
                            u[i] = 0.0;
                        }
                        (true, false) => {
                            l[i] = 0.0;
                            u[i] = f64::INFINITY;
                        }
                        (false, false) => {
                            l[i] = f64::NEG_INFINITY;
                            u[i] = f64::INFINITY;
                        }
                    }
                }
                ConvexSet::Box { lower: l, upper: u }.canonical()
            }
            _ => unreachable!("is_cone excludes the remaining variants"),
        })
    }

    // ---- algebra on descriptors -----------------------------------------

    /// The set `-S`.
    pub fn negate(&self) -> ConvexSet {
        match self {
            ConvexSet::WholeSpace { .. } => self.clone(),
            ConvexSet::Singleton { point } => ConvexSet::Singleton { point: -point },
            ConvexSet::Ball { center, radius } => ConvexSet::Ball {
                center: -center,
                radius: *radius,
            },
            ConvexSet::AffineSubspace { anchor, basis } => ConvexSet::AffineSubspace {
                anchor: -anchor,
                basis: basis.clone(),
            },
            ConvexSet::Box { lower, upper } => ConvexSet::Box {
                lower: -upper,
                upper: -lower,
            },
            ConvexSet::Ray { direction } => ConvexSet::Ray {
                direction: -direction,
            },
            ConvexSet::Halfspace { normal, offset } => ConvexSet::Halfspace {
                normal: -normal,
                offset: *offset,
            },
            ConvexSet::Orthant { signs } => ConvexSet::Orthant {
                signs: signs.iter().map(|s| -s).collect(),
            },
            ConvexSet::SumBallSubspace {
                center,
                radius,
                basis,
            } => ConvexSet::SumBallSubspace {
                center: -center,
                radius: *radius,
                basis: basis.clone(),
            },
            ConvexSet::Shifted { base, shift } => ConvexSet::Shifted {
                base: Box::new(base.negate()),
                shift: -shift,
            },
        }
    }

    /// The set `S + t`.
    pub fn translate(&self, t: &Point) -> ConvexSet {
        if t.norm() == 0.0 {
            return self.clone();
        }
        match self {
            ConvexSet::WholeSpace { .. } => self.clone(),
            ConvexSet::Singleton { point } => ConvexSet::Singleton { point: point + t },
            ConvexSet::Ball { center, radius } => ConvexSet::Ball {
                center: center + t,
                radius: *radius,
            },
            ConvexSet::AffineSubspace { anchor, basis } => ConvexSet::AffineSubspace {
                anchor: anchor + t,
                basis: basis.clone(),
            },
            ConvexSet::Box { lower, upper } => ConvexSet::Box {
                lower: lower + t,
                upper: upper + t,
            },
            ConvexSet::Halfspace { normal, offset } => ConvexSet::Halfspace {
                normal: normal.clone(),
                offset: offset + normal.dot(t),
            },
            ConvexSet::SumBallSubspace {
                center,
                radius,
                basis,
            } => ConvexSet::SumBallSubspace {
                center: center + t,
                radius: *radius,
                basis: basis.clone(),
            },
            ConvexSet::Shifted { base, shift } => ConvexSet::Shifted {
                base: base.clone(),
                shift: shift + t,
            },
            ConvexSet::Ray { .. } | ConvexSet::Orthant { .. } => ConvexSet::Shifted {
                base: Box::new(self.clone()),
                shift: t.clone(),
            },
        }
    }

    /// Closed-form Minkowski sum for catalog combinations; `None` when no
    /// closed form is implemented.
    pub fn minkowski_sum(&self, other: &ConvexSet) -> Option<ConvexSet> {
        let a = self.clone().canonical();
        let b = other.clone().canonical();
        minkowski_impl(&a, &b)
            .or_else(|| minkowski_impl(&b, &a))
            .map(|s| s.canonical())
    }

    /// Rewrite to a simpler variant where one exists (set-equal result).
    pub fn canonical(self) -> ConvexSet {
        match self {
            ConvexSet::AffineSubspace { anchor, basis } => {
                if basis.ncols() == 0 {
                    ConvexSet::Singleton { point: anchor }
                } else if basis.ncols() == anchor.len() {
                    ConvexSet::WholeSpace { dim: anchor.len() }
                } else {
                    ConvexSet::AffineSubspace { anchor, basis }
                }
            }
            ConvexSet::SumBallSubspace {
                center,
                radius,
                basis,
            } => {
                if basis.ncols() == 0 {
                    ConvexSet::Ball { center, radius }
                } else {
                    ConvexSet::SumBallSubspace {
                        center,
                        radius,
                        basis,
                    }
                }
            }
            ConvexSet::Box { lower, upper } => canonical_box(lower, upper),
            ConvexSet::Shifted { base, shift } => {
                let inner = base.canonical();
                if shift.norm() == 0.0 {
                    inner
                } else {
                    match inner {
                        ConvexSet::Shifted {
                            base: b2,
                            shift: s2,
                        } => ConvexSet::Shifted {
                            base: b2,
                            shift: s2 + shift,
                        },
                        s if s.absorbs_translation() => s.translate(&shift),
                        s => ConvexSet::Shifted {
                            base: Box::new(s),
                            shift,
                        },
                    }
                }
            }
            s => s,
        }
    }

    fn absorbs_translation(&self) -> bool {
        !matches!(
            self,
            ConvexSet::Ray { .. } | ConvexSet::Orthant { .. } | ConvexSet::Shifted { .. }
        )
    }

    /// Whether the set is bounded.
    pub fn is_bounded(&self) -> bool {
        match self {
            ConvexSet::Singleton { .. } | ConvexSet::Ball { .. } => true,
            ConvexSet::WholeSpace { dim } => *dim == 0,
            ConvexSet::AffineSubspace { basis, .. } => basis.ncols() == 0,
            ConvexSet::Box { lower, upper } => {
                lower.iter().all(|v| v.is_finite()) && upper.iter().all(|v| v.is_finite())
            }
            ConvexSet::Ray { .. } | ConvexSet::Halfspace { .. } | ConvexSet::Orthant { .. } => {
                false
            }
            ConvexSet::SumBallSubspace { basis, .. } => basis.ncols() == 0,
            ConvexSet::Shifted { base, .. } => base.is_bounded(),
        }
    }

    /// Whether the set has nonempty interior, decided symbolically from the
    /// variant (never numerically).
    pub fn has_interior(&self) -> bool {
        match self {
            ConvexSet::WholeSpace { .. }
            | ConvexSet::Ball { .. }
            | ConvexSet::Halfspace { .. }
            | ConvexSet::Orthant { .. }
            | ConvexSet::SumBallSubspace { .. } => true,
            ConvexSet::Singleton { .. } => false,
            ConvexSet::AffineSubspace { anchor, basis } => basis.ncols() == anchor.len(),
            ConvexSet::Box { lower, upper } => (0..lower.len()).all(|i| lower[i] < upper[i]),
            ConvexSet::Ray { direction } => direction.len() == 1,
            ConvexSet::Shifted { base, .. } => base.has_interior(),
        }
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self, ConvexSet::WholeSpace { .. })
    }

    /// Strictly affine variants (point or proper affine subspace). The whole
    /// space is deliberately excluded; it is classified as "full" instead.
    pub fn is_strict_affine(&self) -> bool {
        match self {
            ConvexSet::Singleton { .. } => true,
            ConvexSet::AffineSubspace { anchor, basis } => basis.ncols() < anchor.len(),
            _ => false,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            ConvexSet::WholeSpace { .. } => "whole_space",
            ConvexSet::Singleton { .. } => "singleton",
            ConvexSet::Ball { .. } => "ball",
            ConvexSet::AffineSubspace { .. } => "affine_subspace",
            ConvexSet::Box { .. } => "box",
            ConvexSet::Ray { .. } => "ray",
            ConvexSet::Halfspace { .. } => "halfspace",
            ConvexSet::Orthant { .. } => "orthant",
            ConvexSet::SumBallSubspace { .. } => "sum_ball_subspace",
            ConvexSet::Shifted { .. } => "shifted",
        }
    }

    /// Box representation for axis-aligned variants, used by the Minkowski
    /// catalog.
    fn to_box(&self) -> Option<(DVector<f64>, DVector<f64>)> {
        let dim = self.dim();
        match self {
            ConvexSet::Box { lower, upper } => Some((lower.clone(), upper.clone())),
            ConvexSet::Singleton { point } => Some((point.clone(), point.clone())),
            ConvexSet::WholeSpace { .. } => Some((
                DVector::from_element(dim, f64::NEG_INFINITY),
                DVector::from_element(dim, f64::INFINITY),
            )),
            ConvexSet::Orthant { signs } => {
                let mut l = DVector::zeros(dim);
                let mut u = DVector::zeros(dim);
                for i in 0..dim {
                    if signs[i] > 0 {
                        u[i] = f64::INFINITY;
                    } else {
                        l[i] = f64::NEG_INFINITY;
                    }
                }
                Some((l, u))
            }
            ConvexSet::Ray { direction } => {
                // only axis-aligned rays are boxes
                let mut axis = None;
                for i in 0..dim {
                    if direction[i].abs() > 1e-12 {
                        if axis.is_some() {
                            return None;
                        }
                        axis = Some((i, direction[i] > 0.0));
                    }
                }
                let (i, positive) = axis?;
                let mut l = DVector::zeros(dim);
                let mut u = DVector::zeros(dim);
                if positive {
                    u[i] = f64::INFINITY;
                } else {
                    l[i] = f64::NEG_INFINITY;
                }
                Some((l, u))
            }
            _ => None,
        }
    }
}

fn canonical_box(lower: DVector<f64>, upper: DVector<f64>) -> ConvexSet {
    let dim = lower.len();
    let all_pinned = (0..dim).all(|i| lower[i] == upper[i]);
    if all_pinned {
        return ConvexSet::Singleton { point: lower };
    }
    let all_free = (0..dim).all(|i| lower[i] == f64::NEG_INFINITY && upper[i] == f64::INFINITY);
    if all_free {
        return ConvexSet::WholeSpace { dim };
    }
    // single half-line axis, every other axis pinned to zero -> ray
    let mut half_axis = None;
    let mut ray_like = true;
    for i in 0..dim {
        let pinned_zero = lower[i] == 0.0 && upper[i] == 0.0;
        let up_ray = lower[i] == 0.0 && upper[i] == f64::INFINITY;
        let down_ray = lower[i] == f64::NEG_INFINITY && upper[i] == 0.0;
        if pinned_zero {
            continue;
        }
        if (up_ray || down_ray) && half_axis.is_none() {
            half_axis = Some((i, up_ray));
        } else {
            ray_like = false;
            break;
        }
    }
    if ray_like {
        if let Some((i, up)) = half_axis {
            let mut d = DVector::zeros(dim);
            d[i] = if up { 1.0 } else { -1.0 };
            return ConvexSet::Ray { direction: d };
        }
    }
    ConvexSet::Box { lower, upper }
}

fn merge_spans(dim: usize, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = a
        .column_iter()
        .chain(b.column_iter())
        .map(|c| c.clone_owned())
        .collect();
    gram_schmidt(dim, &cols, 1e-9)
}

fn minkowski_impl(a: &ConvexSet, b: &ConvexSet) -> Option<ConvexSet> {
    use ConvexSet::*;
    let dim = a.dim();
    match (a, b) {
        (WholeSpace { .. }, _) => Some(WholeSpace { dim }),
        (Singleton { point }, s) => Some(s.translate(point)),
        (Shifted { base, shift }, s) => base.minkowski_sum(s).map(|r| r.translate(shift)),
        (
            Ball {
                center: c1,
                radius: r1,
            },
            Ball {
                center: c2,
                radius: r2,
            },
        ) => Some(Ball {
            center: c1 + c2,
            radius: r1 + r2,
        }),
        (Ball { center, radius }, AffineSubspace { anchor, basis }) => Some(SumBallSubspace {
            center: center + anchor,
            radius: *radius,
            basis: basis.clone(),
        }),
        (
            Ball {
                center: c1,
                radius: r1,
            },
            SumBallSubspace {
                center: c2,
                radius: r2,
                basis,
            },
        ) => Some(SumBallSubspace {
            center: c1 + c2,
            radius: r1 + r2,
            basis: basis.clone(),
        }),
        (Ball { center, radius }, Halfspace { normal, offset }) => Some(Halfspace {
            normal: normal.clone(),
            offset: offset + normal.dot(center) + radius,
        }),
        (
            AffineSubspace {
                anchor: p1,
                basis: q1,
            },
            AffineSubspace {
                anchor: p2,
                basis: q2,
            },
        ) => Some(
            AffineSubspace {
                anchor: p1 + p2,
                basis: merge_spans(dim, q1, q2),
            }
            .canonical(),
        ),
        (
            AffineSubspace { anchor, basis },
            SumBallSubspace {
                center,
                radius,
                basis: q2,
            },
        ) => Some(SumBallSubspace {
            center: center + anchor,
            radius: *radius,
            basis: merge_spans(dim, basis, q2),
        }),
        (AffineSubspace { anchor, basis }, Halfspace { normal, offset }) => {
            if (basis.transpose() * normal).norm() <= 1e-12 {
                Some(Halfspace {
                    normal: normal.clone(),
                    offset: offset + normal.dot(anchor),
                })
            } else {
                Some(WholeSpace { dim })
            }
        }
        (
            SumBallSubspace {
                center: c1,
                radius: r1,
                basis: q1,
            },
            SumBallSubspace {
                center: c2,
                radius: r2,
                basis: q2,
            },
        ) => Some(SumBallSubspace {
            center: c1 + c2,
            radius: r1 + r2,
            basis: merge_spans(dim, q1, q2),
        }),
        (
            Halfspace {
                normal: n1,
                offset: o1,
            },
            Halfspace {
                normal: n2,
                offset: o2,
            },
        ) => {
            if (n1 - n2).norm() <= 1e-12 {
                Some(Halfspace {
                    normal: n1.clone(),
                    offset: o1 + o2,
                })
            } else {
                // normals differ: the sum sweeps out everything
                Some(WholeSpace { dim })
            }
        }
        _ => {
            // axis-aligned variants combine through their box form
            let (la, ua) = a.to_box()?;
            let (lb, ub) = b.to_box()?;
            let l = DVector::from_fn(dim, |i, _| la[i] + lb[i]);
            let u = DVector::from_fn(dim, |i, _| ua[i] + ub[i]);
            Some(canonical_box(l, u))
        }
    }
}

/// Dykstra's alternating scheme for the projection onto an intersection of
/// catalog sets. Only used for diagnostics, never in iteration hot paths.
/// Stops when the iterate both moves less than `tol` over a full cycle and
/// sits within `tol` of every set; the feasibility part is what lets an
/// empty intersection surface as `NotConverged` instead of a bogus point
/// (on disjoint sets the cycle displacement alone still stalls at zero).
pub fn project_intersection(
    sets: &[ConvexSet],
    x: &Point,
    tol: f64,
    max_cycles: usize,
) -> Result<Point> {
    if sets.is_empty() {
        return Err(Error::InvalidInstance("empty intersection list".into()));
    }
    let dim = sets[0].dim();
    for s in sets {
        if s.dim() != dim {
            return Err(Error::dim(dim, s.dim()));
        }
    }
    check_dim(dim, x)?;

    let mut z = x.clone();
    let mut increments = vec![DVector::zeros(dim); sets.len()];
    let mut residual = f64::INFINITY;
    for _cycle in 0..max_cycles {
        let start = z.clone();
        for (set, p) in sets.iter().zip(increments.iter_mut()) {
            let target = &z + &*p;
            let y = set.project_unchecked(&target);
            *p = target - &y;
            z = y;
        }
        let displacement = (&z - start).norm();
        let infeasibility = sets
            .iter()
            .map(|s| (&z - s.project_unchecked(&z)).norm())
            .fold(0.0, f64::max);
        residual = displacement.max(infeasibility);
        if residual <= tol {
            return Ok(z);
        }
    }
    Err(Error::NotConverged {
        iterate: z.as_slice().to_vec(),
        residual,
        iterations: max_cycles,
    })
}
