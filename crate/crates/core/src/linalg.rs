//! Small dense helpers: orthonormalization and complements.

use nalgebra::{DMatrix, DVector};

/// Drop tolerance used when orthonormalizing subspace bases.
pub const ORTHO_DROP_TOL: f64 = 1e-12;

/// Modified Gram-Schmidt with a drop tolerance. Returns a `d x k` matrix with
/// orthonormal columns spanning the same space as the input columns.
pub fn gram_schmidt(dim: usize, columns: &[DVector<f64>], drop_tol: f64) -> DMatrix<f64> {
    let mut kept: Vec<DVector<f64>> = Vec::new();
    for col in columns {
        assert_eq!(col.len(), dim, "basis column has wrong dimension");
        let mut v = col.clone();
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for q in &kept {
                let c = q.dot(&v);
                v -= q * c;
            }
        }
        let n = v.norm();
        if n > drop_tol {
            kept.push(v / n);
        }
    }
    let k = kept.len();
    DMatrix::from_fn(dim, k, |i, j| kept[j][i])
}

/// Orthonormal basis of the orthogonal complement of the column space of `q`.
/// Columns of `q` must already be orthonormal.
pub fn orthonormal_complement(dim: usize, q: &DMatrix<f64>) -> DMatrix<f64> {
    let mut candidates: Vec<DVector<f64>> =
        (0..q.ncols()).map(|j| q.column(j).clone_owned()).collect();
    let base = candidates.len();
    for i in 0..dim {
        let mut e = DVector::zeros(dim);
        e[i] = 1.0;
        candidates.push(e);
    }
    let full = gram_schmidt(dim, &candidates, 1e-9);
    // first `base` columns reproduce q; the rest span the complement
    DMatrix::from_fn(dim, full.ncols() - base, |i, j| full[(i, j + base)])
}

/// Project `x` onto the column space of the orthonormal matrix `q`.
pub fn span_project(q: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    if q.ncols() == 0 {
        return DVector::zeros(x.len());
    }
    q * (q.transpose() * x)
}
