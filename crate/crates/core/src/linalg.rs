//! Small dense helpers shared by the geometry modules.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::symplectic::RealVector;

/// Modified Gram-Schmidt in the inner product `u^T G v` (Euclidean when
/// `gram` is `None`). Column order is preserved, so the result is a
/// deterministic gauge of the span.
pub fn gram_schmidt(vs: &[RealVector], gram: Option<&DMatrix<f64>>) -> Result<Vec<RealVector>> {
    let inner = |u: &RealVector, v: &RealVector| match gram {
        Some(g) => u.dot(&(g * v)),
        None => u.dot(v),
    };
    let mut out: Vec<RealVector> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v.clone();
        for e in &out {
            let c = inner(e, &w);
            w.axpy(-c, e, 1.0);
        }
        let norm = inner(&w, &w).max(0.0).sqrt();
        let scale = inner(v, v).max(0.0).sqrt().max(f64::MIN_POSITIVE);
        if norm <= 1e-12 * scale {
            return Err(Error::Invalid("vectors are linearly dependent".into()));
        }
        out.push(w / norm);
    }
    Ok(out)
}

/// Function of a symmetric matrix through its eigendecomposition.
pub fn symmetric_apply(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Smallest singular value of a (tall) matrix.
pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    m.singular_values().min()
}

pub fn basis_vector(len: usize, k: usize) -> RealVector {
    RealVector::from_fn(len, |i, _| if i == k { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_preserves_order_and_span() {
        let a = RealVector::from_column_slice(&[2.0, 0.0, 0.0]);
        let b = RealVector::from_column_slice(&[1.0, 1.0, 0.0]);
        let e = gram_schmidt(&[a, b], None).unwrap();
        assert!((&e[0] - basis_vector(3, 0)).amax() < 1e-15);
        assert!((&e[1] - basis_vector(3, 1)).amax() < 1e-15);
    }

    #[test]
    fn gram_schmidt_rejects_dependent_input() {
        let a = RealVector::from_column_slice(&[1.0, 2.0]);
        assert!(gram_schmidt(&[a.clone(), a * 3.0], None).is_err());
    }

    #[test]
    fn weighted_gram_schmidt_is_orthonormal_in_weight() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let e = gram_schmidt(&[basis_vector(2, 0), basis_vector(2, 1)], Some(&g)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((e[i].dot(&(&g * &e[j])) - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn symmetric_square_root() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let r = symmetric_apply(&m, f64::sqrt);
        assert!((&r * &r - m).amax() < 1e-13);
    }
}
