//! Flat Kähler linear algebra on `C^n = R^{2n}`.
//!
//! Coordinates use the block convention `(x_1..x_n, y_1..y_n)` with
//! `z_k = x_k + i y_k`. The complex structure is multiplication by `i`,
//! `J(x, y) = (-y, x)`, and the Kähler form is `ω(u, v) = g(u, Jv)`.
//! In these coordinates `ω = -Σ dx_k ∧ dy_k`. Every sign in the crate
//! follows from this one choice.

pub use nalgebra::Complex;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Real tangent vector of the ambient space, length `2n`.
pub type RealVector = DVector<f64>;
/// Complex `n`-vector under the block identification.
pub type ComplexVector = DVector<Complex<f64>>;
pub type ComplexMatrix = DMatrix<Complex<f64>>;

/// Flat Calabi-Yau ambient: `C^n`, or a flat torus `C^n / Γ` when lattice
/// periods are given.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientSpace {
    n: usize,
    periods: Option<Vec<RealVector>>,
}

impl AmbientSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("complex dimension must be positive".into()));
        }
        Ok(Self { n, periods: None })
    }

    /// Flat torus quotient. Requires `2n` real-linearly independent periods.
    pub fn torus(n: usize, periods: Vec<RealVector>) -> Result<Self> {
        let space = Self::new(n)?;
        if periods.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                actual: periods.len(),
            });
        }
        for p in &periods {
            space.check(p)?;
        }
        let lattice = DMatrix::from_columns(&periods);
        let sv = lattice.singular_values();
        let smallest = sv.min();
        if smallest <= 1e-12 * sv.max().max(1.0) {
            return Err(Error::Invalid(format!(
                "torus periods are linearly dependent (smallest singular value {smallest:e})"
            )));
        }
        Ok(Self {
            n,
            periods: Some(periods),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn periods(&self) -> Option<&[RealVector]> {
        self.periods.as_deref()
    }

    fn check(&self, v: &RealVector) -> Result<()> {
        if v.len() != 2 * self.n {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n,
                actual: v.len(),
            });
        }
        Ok(())
    }

    pub fn j_apply(&self, v: &RealVector) -> Result<RealVector> {
        self.check(v)?;
        Ok(j_apply(v))
    }

    pub fn g_inner(&self, u: &RealVector, v: &RealVector) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(u.dot(v))
    }

    pub fn omega(&self, u: &RealVector, v: &RealVector) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(omega(u, v))
    }

    pub fn to_complex(&self, v: &RealVector) -> Result<ComplexVector> {
        self.check(v)?;
        Ok(to_complex(v))
    }

    pub fn from_complex(&self, z: &ComplexVector) -> Result<RealVector> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: z.len(),
            });
        }
        Ok(from_complex(z))
    }

    /// `Ω(v_1, ..., v_n) = det[z(v_1) | ... | z(v_n)]`.
    pub fn holomorphic_volume(&self, vs: &[RealVector]) -> Result<Complex<f64>> {
        if vs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: vs.len(),
            });
        }
        for v in vs {
            self.check(v)?;
        }
        Ok(complex_columns(vs).determinant())
    }
}

/// `J(x, y) = (-y, x)`. The length of `v` fixes `n`.
pub fn j_apply(v: &RealVector) -> RealVector {
    let n = v.len() / 2;
    let mut out = RealVector::zeros(v.len());
    for k in 0..n {
        out[k] = -v[n + k];
        out[n + k] = v[k];
    }
    out
}

/// `ω(u, v) = g(u, Jv) = Σ_k (u_{y_k} v_{x_k} - u_{x_k} v_{y_k})`.
pub fn omega(u: &RealVector, v: &RealVector) -> f64 {
    let n = u.len() / 2;
    (0..n).map(|k| u[n + k] * v[k] - u[k] * v[n + k]).sum()
}

/// The `2n x 2n` matrix of `J`.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(k, n + k)] = -1.0;
        m[(n + k, k)] = 1.0;
    }
    m
}

pub fn to_complex(v: &RealVector) -> ComplexVector {
    let n = v.len() / 2;
    ComplexVector::from_fn(n, |k, _| Complex::new(v[k], v[n + k]))
}

pub fn from_complex(z: &ComplexVector) -> RealVector {
    let n = z.len();
    RealVector::from_fn(2 * n, |k, _| if k < n { z[k].re } else { z[k - n].im })
}

/// Columns `to_complex(v_k)` assembled into an `n x k` complex matrix.
pub fn complex_columns(vs: &[RealVector]) -> ComplexMatrix {
    let n = vs.first().map_or(0, |v| v.len() / 2);
    ComplexMatrix::from_fn(n, vs.len(), |i, j| Complex::new(vs[j][i], vs[j][n + i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> RealVector {
        RealVector::from_column_slice(xs)
    }

    #[test]
    fn j_examples() {
        let c1 = AmbientSpace::new(1).unwrap();
        let c2 = AmbientSpace::new(2).unwrap();
        assert_eq!(c1.j_apply(&v(&[1.0, 0.0])).unwrap(), v(&[0.0, 1.0]));
        assert_eq!(c1.j_apply(&v(&[0.0, 1.0])).unwrap(), v(&[-1.0, 0.0]));
        assert_eq!(
            c2.j_apply(&v(&[1.0, 0.0, 0.0, 0.0])).unwrap(),
            v(&[0.0, 0.0, 1.0, 0.0])
        );
        assert!(matches!(
            c2.j_apply(&v(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { expected: 4, actual: 2 })
        ));
    }

    #[test]
    fn inner_and_omega_examples() {
        let c1 = AmbientSpace::new(1).unwrap();
        let ex = v(&[1.0, 0.0]);
        let ey = v(&[0.0, 1.0]);
        assert_eq!(c1.g_inner(&ex, &ex).unwrap(), 1.0);
        assert_eq!(c1.g_inner(&ex, &ey).unwrap(), 0.0);
        assert_eq!(c1.g_inner(&v(&[3.0, 4.0]), &v(&[3.0, 4.0])).unwrap(), 25.0);
        assert_eq!(c1.omega(&ex, &ey).unwrap(), -1.0);
        assert_eq!(c1.omega(&ey, &ey).unwrap(), 0.0);

        let c2 = AmbientSpace::new(2).unwrap();
        let ex1 = v(&[1.0, 0.0, 0.0, 0.0]);
        let ey2 = v(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(c2.omega(&ex1, &ey2).unwrap(), 0.0);
        assert!(c2.omega(&ex1, &ex).is_err());
    }

    #[test]
    fn omega_matches_definition() {
        let u = v(&[0.3, -1.2, 2.0, 0.7]);
        let w = v(&[1.1, 0.4, -0.5, 2.2]);
        assert!((omega(&u, &w) - u.dot(&j_apply(&w))).abs() < 1e-15);
        assert_eq!(j_matrix(2) * &w, j_apply(&w));
    }

    #[test]
    fn complex_identification() {
        let c1 = AmbientSpace::new(1).unwrap();
        let z = c1.to_complex(&v(&[1.0, 2.0])).unwrap();
        assert_eq!(z[0], Complex::new(1.0, 2.0));
        let w = v(&[0.5, -1.5, 2.0, 3.0]);
        assert_eq!(from_complex(&to_complex(&w)), w);
        let i = Complex::new(0.0, 1.0);
        assert_eq!(to_complex(&j_apply(&w)), to_complex(&w) * i);
        assert!(c1.from_complex(&to_complex(&w)).is_err());
    }

    #[test]
    fn holomorphic_volume_examples() {
        for n in 1..=3 {
            let space = AmbientSpace::new(n).unwrap();
            let basis: Vec<_> = (0..n)
                .map(|k| RealVector::from_fn(2 * n, |i, _| if i == k { 1.0 } else { 0.0 }))
                .collect();
            let vol = space.holomorphic_volume(&basis).unwrap();
            assert!((vol - Complex::new(1.0, 0.0)).norm() < 1e-15);
            if n >= 2 {
                let mut swapped = basis.clone();
                swapped.swap(0, 1);
                let vs = space.holomorphic_volume(&swapped).unwrap();
                assert!((vs + vol).norm() < 1e-15);
            }
        }
        let c1 = AmbientSpace::new(1).unwrap();
        let vol = c1.holomorphic_volume(&[v(&[0.0, 1.0])]).unwrap();
        assert_eq!(vol, Complex::new(0.0, 1.0));
        assert!(c1.holomorphic_volume(&[]).is_err());
    }

    #[test]
    fn torus_periods_must_be_independent() {
        let e = |k: usize| RealVector::from_fn(2, |i, _| if i == k { 1.0 } else { 0.0 });
        assert!(AmbientSpace::torus(1, vec![e(0), e(1)]).is_ok());
        assert!(AmbientSpace::torus(1, vec![e(0), e(0) * 2.0]).is_err());
        assert!(AmbientSpace::torus(1, vec![e(0)]).is_err());
        assert!(AmbientSpace::new(0).is_err());
    }
}
