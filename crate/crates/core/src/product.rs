//! Product-space construction: lift m operators on `X` to the pair
//! `(A_1 x ... x A_m, N_Delta)` on `X^m`, where `Delta` is the diagonal.
//! The whole splitting pipeline then runs on the lifted instance.
//!
//! Block layout is contiguous by factor: factor `i` owns coordinates
//! `[i*d, (i+1)*d)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operators::{normal_cone, MonotoneOp, Rectangularity};
use crate::sets::{ConvexSet, Point};
use crate::splitting::DrInstance;

/// A lifted instance together with the factors it was built from.
#[derive(Clone, Debug)]
pub struct ProductInstance {
    factors: Vec<MonotoneOp>,
    lifted: DrInstance,
    factor_dim: usize,
}

impl ProductInstance {
    pub fn factors(&self) -> &[MonotoneOp] {
        &self.factors
    }

    pub fn lifted(&self) -> &DrInstance {
        &self.lifted
    }

    pub fn factor_dim(&self) -> usize {
        self.factor_dim
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }
}

/// Orthonormal basis of the diagonal `{(x, ..., x)}` in `X^m`: one column
/// per coordinate of `X`, each `1/sqrt(m)` on the m copies.
fn diagonal_basis(m: usize, d: usize) -> DMatrix<f64> {
    let scale = 1.0 / (m as f64).sqrt();
    DMatrix::from_fn(
        m * d,
        d,
        |row, col| {
            if row % d == col {
                scale
            } else {
                0.0
            }
        },
    )
}

/// Product of catalog sets where the result is again a catalog set
/// (boxes, singletons, whole spaces, and affine subspaces combine).
fn product_set(sets: &[&ConvexSet]) -> Option<ConvexSet> {
    let total: usize = sets.iter().map(|s| s.dim()).sum();
    if sets.iter().all(|s| s.is_whole_space()) {
        return Some(ConvexSet::whole_space(total));
    }
    // box-like: every factor has a box form
    let mut lowers = Vec::with_capacity(total);
    let mut uppers = Vec::with_capacity(total);
    let mut all_boxy = true;
    for s in sets {
        match box_form(s) {
            Some((l, u)) => {
                lowers.extend(l.iter().cloned());
                uppers.extend(u.iter().cloned());
            }
            None => {
                all_boxy = false;
                break;
            }
        }
    }
    if all_boxy {
        return Some(
            ConvexSet::hyper_box(DVector::from_vec(lowers), DVector::from_vec(uppers))
                .expect("factor boxes are valid"),
        );
    }
    // affine factors stack block-diagonally
    if sets.iter().all(|s| {
        matches!(
            s,
            ConvexSet::AffineSubspace { .. } | ConvexSet::Singleton { .. }
        )
    }) {
        let mut anchor = DVector::zeros(total);
        let mut cols: Vec<DVector<f64>> = Vec::new();
        let mut offset = 0;
        for s in sets {
            match s {
                ConvexSet::Singleton { point } => {
                    anchor.rows_mut(offset, point.len()).copy_from(point);
                    offset += point.len();
                }
                ConvexSet::AffineSubspace { anchor: a, basis } => {
                    anchor.rows_mut(offset, a.len()).copy_from(a);
                    for j in 0..basis.ncols() {
                        let mut col = DVector::zeros(total);
                        col.rows_mut(offset, a.len())
                            .copy_from(&basis.column(j).clone_owned());
                        cols.push(col);
                    }
                    offset += a.len();
                }
                _ => unreachable!(),
            }
        }
        return ConvexSet::affine_subspace(anchor, &cols).ok();
    }
    None
}

fn box_form(s: &ConvexSet) -> Option<(DVector<f64>, DVector<f64>)> {
    match s {
        ConvexSet::Box { lower, upper } => Some((lower.clone(), upper.clone())),
        ConvexSet::Singleton { point } => Some((point.clone(), point.clone())),
        ConvexSet::WholeSpace { dim } => Some((
            DVector::from_element(*dim, f64::NEG_INFINITY),
            DVector::from_element(*dim, f64::INFINITY),
        )),
        _ => None,
    }
}

/// Lift `factors` to the product-space pair. All factors must share a
/// dimension and be flagged rectangular; a non-rectangular factor is a
/// construction error, not a warning.
pub fn lift(factors: Vec<MonotoneOp>) -> Result<ProductInstance> {
    if factors.len() < 2 {
        return Err(Error::Construction(
            "product lift needs at least two factors".into(),
        ));
    }
    let d = factors[0].dim();
    for f in &factors {
        if f.dim() != d {
            return Err(Error::Construction(format!(
                "product factors must share a dimension: {} vs {}",
                d,
                f.dim()
            )));
        }
        if f.rectangular() != Rectangularity::Yes {
            return Err(Error::Construction(format!(
                "product factor {} is not flagged rectangular",
                f.label()
            )));
        }
    }
    let m = factors.len();
    let total = m * d;

    let factor_clones = factors.clone();
    let mut op_a = MonotoneOp::from_resolvent(total, format!("product(m={m})"), move |x| {
        let mut y = DVector::zeros(x.len());
        for (i, f) in factor_clones.iter().enumerate() {
            let block = x.rows(i * d, d).clone_owned();
            let jb = f
                .resolvent(&block)
                .expect("factor dimensions validated at lift");
            y.rows_mut(i * d, d).copy_from(&jb);
        }
        y
    })
    .with_rectangular(Rectangularity::Yes);

    let doms: Option<Vec<&ConvexSet>> = factors.iter().map(|f| f.dom()).collect();
    let rans: Option<Vec<&ConvexSet>> = factors.iter().map(|f| f.ran()).collect();
    if let Some(sets) = doms.as_ref().and_then(|s| product_set(s)) {
        op_a = op_a.with_dom(sets);
    }
    if let Some(sets) = rans.as_ref().and_then(|s| product_set(s)) {
        op_a = op_a.with_ran(sets);
    }

    let delta = ConvexSet::AffineSubspace {
        anchor: DVector::zeros(total),
        basis: diagonal_basis(m, d),
    };
    let op_b = normal_cone(delta);

    let lifted = DrInstance::new(op_a, op_b)?;
    Ok(ProductInstance {
        factors,
        lifted,
        factor_dim: d,
    })
}

/// True iff the blockwise sum of `u` vanishes, i.e. `u` lies in the
/// orthogonal complement of the diagonal.
pub fn delta_perp_check(u: &Point, m: usize) -> Result<bool> {
    if m == 0 || !u.len().is_multiple_of(m) {
        return Err(Error::dim(m.max(1), u.len()));
    }
    let d = u.len() / m;
    let mut sum = DVector::zeros(d);
    for i in 0..m {
        sum += u.rows(i * d, d);
    }
    Ok(sum.norm() <= 1e-12)
}
