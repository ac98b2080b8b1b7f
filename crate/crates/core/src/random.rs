//! Seeded samplers for the matrix groups used in tests and catalog shapes.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::symplectic::{ComplexMatrix, RealVector};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vector<R: Rng>(rng: &mut R, len: usize) -> RealVector {
    RealVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

pub fn normal_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Real orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    normal_matrix(rng, n, n).qr().q()
}

pub fn symmetric<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = normal_matrix(rng, n, n);
    (&a + a.transpose()) * 0.5
}

/// Random anti-Hermitian generator; traceless when `traceless` is set.
pub fn anti_hermitian<R: Rng>(rng: &mut R, n: usize, traceless: bool) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut x = (&a - a.adjoint()) * Complex::new(0.5, 0.0);
    if traceless {
        let shift = x.trace() / Complex::new(n as f64, 0.0);
        for k in 0..n {
            x[(k, k)] -= shift;
        }
    }
    x
}

/// `exp(X)` for anti-Hermitian `X`: a unitary matrix.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    anti_hermitian(rng, n, false).exp()
}

/// Special unitary matrix, `exp` of a traceless anti-Hermitian matrix.
pub fn special_unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    anti_hermitian(rng, n, true).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_unitary_has_unit_determinant() {
        let mut r = rng(7);
        for n in 1..=4 {
            let m = special_unitary(&mut r, n);
            let id = ComplexMatrix::identity(n, n);
            assert!((m.adjoint() * &m - id).camax() < 1e-12);
            assert!((m.determinant() - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut r = rng(3);
        let q = orthogonal(&mut r, 3);
        assert!((q.transpose() * &q - DMatrix::identity(3, 3)).amax() < 1e-12);
    }
}
