//! Lagrangian Grassmannian: frames, the `det²` map, the Maslov map relative
//! to a reference plane, and the tangent-space machinery along plane paths.
//!
//! A Lagrangian plane is carried by a g-orthonormal frame, equivalently a
//! unitary matrix `U` whose columns are the complexified frame vectors. The
//! frame is only defined up to `O(n)`, so every plane-level quantity goes
//! through `det(U)²`. Unit-circle values stay complex; angles only appear
//! after explicit unwrapping in [`crate::maslov`].

pub mod transport;

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, gram_schmidt};
use crate::symplectic::{complex_columns, from_complex, j_apply, omega, ComplexMatrix, RealVector};

pub use transport::{adapted_frame, frame_residuals, parallel_transport_plane, TransportResult};

pub const ORTHONORMAL_TOL: f64 = 1e-10;
pub const LAGRANGIAN_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-9;
/// Largest frame distance between gauge-aligned neighbours before a path
/// sample is rejected as under-resolved.
pub const GAUGE_DISTANCE_LIMIT: f64 = 0.5;

/// Ordered g-orthonormal basis of a Lagrangian `n`-plane in `R^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame {
    vectors: Vec<RealVector>,
}

impl LagrangianFrame {
    pub fn new(vectors: Vec<RealVector>) -> Result<Self> {
        Self::with_lagrangian_tolerance(vectors, LAGRANGIAN_TOL)
    }

    /// Validation with a looser Lagrangian bound, for planes measured from
    /// finite-difference jets. The unitary bound widens accordingly.
    pub fn with_lagrangian_tolerance(vectors: Vec<RealVector>, lagrangian_tol: f64) -> Result<Self> {
        let lagrangian_tol = lagrangian_tol.max(LAGRANGIAN_TOL);
        let unitary_tol = lagrangian_tol.max(UNITARY_TOL);
        let n = vectors.len();
        if n == 0 {
            return Err(Error::Invalid("a frame needs at least one vector".into()));
        }
        for v in &vectors {
            if v.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    actual: v.len(),
                });
            }
        }
        let frame = Self { vectors };
        let (ortho, lagr) = frame.residuals();
        if ortho > ORTHONORMAL_TOL {
            return Err(Error::Invariant {
                invariant: "orthonormal",
                residual: ortho,
                tolerance: ORTHONORMAL_TOL,
            });
        }
        if lagr > lagrangian_tol {
            return Err(Error::Invariant {
                invariant: "lagrangian",
                residual: lagr,
                tolerance: lagrangian_tol,
            });
        }
        let u = frame.to_unitary();
        let unitary = (u.adjoint() * &u - ComplexMatrix::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if unitary > unitary_tol {
            return Err(Error::Invariant {
                invariant: "unitary",
                residual: unitary,
                tolerance: unitary_tol,
            });
        }
        Ok(frame)
    }

    /// The plane `U·R^n` with frame given by the columns of `U`.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch {
                expected: u.nrows(),
                actual: u.ncols(),
            });
        }
        Self::new(u.column_iter().map(|c| from_complex(&c.into_owned())).collect())
    }

    /// `e_{x_1}, ..., e_{x_n}`.
    pub fn standard(n: usize) -> Self {
        Self {
            vectors: (0..n).map(|k| basis_vector(2 * n, k)).collect(),
        }
    }

    /// Gram-Schmidt orthonormalization of a spanning set, then validation.
    pub fn orthonormalize(vectors: &[RealVector]) -> Result<Self> {
        Self::new(gram_schmidt(vectors, None)?)
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[RealVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<RealVector> {
        self.vectors
    }

    /// `(max |g(v_i, v_j) − δ_ij|, max |ω(v_i, v_j)|)`.
    pub fn residuals(&self) -> (f64, f64) {
        let mut ortho: f64 = 0.0;
        let mut lagr: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((a.dot(b) - delta).abs());
                lagr = lagr.max(omega(a, b).abs());
            }
        }
        (ortho, lagr)
    }

    pub fn to_unitary(&self) -> ComplexMatrix {
        complex_columns(&self.vectors)
    }

    pub fn det_squared(&self) -> Complex<f64> {
        let d = self.to_unitary().determinant();
        d * d
    }

    /// Same plane, frame mixed by a real invertible `n x n` matrix and
    /// re-orthonormalized.
    pub fn remix(&self, m: &DMatrix<f64>) -> Result<Self> {
        let mixed: Vec<RealVector> = (0..self.n())
            .map(|j| {
                self.vectors
                    .iter()
                    .enumerate()
                    .fold(RealVector::zeros(2 * self.n()), |acc, (i, v)| acc + v * m[(i, j)])
            })
            .collect();
        Self::orthonormalize(&mixed)
    }

    /// Frame of the plane `A·plane` for a unitary `A`.
    pub fn transformed(&self, a: &ComplexMatrix) -> Result<Self> {
        Self::from_unitary(&(a * self.to_unitary()))
    }

    /// Orthogonal projection of `v` onto the plane.
    pub fn project(&self, v: &RealVector) -> RealVector {
        self.vectors
            .iter()
            .fold(RealVector::zeros(v.len()), |acc, e| acc + e * e.dot(v))
    }

    /// Component of `v` orthogonal to the plane.
    pub fn reject(&self, v: &RealVector) -> RealVector {
        v - self.project(v)
    }

    /// Largest column distance `max_i |v_i − w_i|`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.vectors
            .iter()
            .zip(&other.vectors)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Frame of this plane closest to `anchor`: project the anchor vectors
    /// onto the plane and re-orthonormalize in order.
    pub fn aligned_to(&self, anchor: &Self) -> Result<Self> {
        let projected: Vec<RealVector> = anchor.vectors.iter().map(|v| self.project(v)).collect();
        let vectors = gram_schmidt(&projected, None).map_err(|_| Error::GaugeMisaligned {
            distance: f64::INFINITY,
        })?;
        Ok(Self { vectors })
    }
}

pub fn frame_to_unitary(f: &LagrangianFrame) -> ComplexMatrix {
    f.to_unitary()
}

/// `det²` of the plane; independent of the chosen frame.
pub fn det_squared(f: &LagrangianFrame) -> Complex<f64> {
    f.det_squared()
}

/// `det²(A)` for the unitary `A = U_f U_ref^†` carrying the reference plane
/// onto `f`. Unchanged when `ref` is replaced by `ref·M`, `M ∈ SU(n)`.
pub fn maslov_map(f: &LagrangianFrame, reference: &LagrangianFrame) -> Result<Complex<f64>> {
    if f.n() != reference.n() {
        return Err(Error::DimensionMismatch {
            expected: reference.n(),
            actual: f.n(),
        });
    }
    let a = f.to_unitary() * reference.to_unitary().adjoint();
    let d = a.determinant();
    Ok(d * d)
}

/// A smooth family of Lagrangian planes `t ↦ frame_at(t)`.
pub struct PlanePath {
    frame_at: Box<dyn Fn(f64) -> Result<LagrangianFrame> + Send + Sync>,
}

impl PlanePath {
    pub fn new(f: impl Fn(f64) -> Result<LagrangianFrame> + Send + Sync + 'static) -> Self {
        Self { frame_at: Box::new(f) }
    }

    pub fn constant(frame: LagrangianFrame) -> Self {
        Self::new(move |_| Ok(frame.clone()))
    }

    /// `t ↦ U(t)·R^n` for a family of unitary matrices.
    pub fn unitary(u: impl Fn(f64) -> ComplexMatrix + Send + Sync + 'static) -> Self {
        Self::new(move |t| LagrangianFrame::from_unitary(&u(t)))
    }

    pub fn frame_at(&self, t: f64) -> Result<LagrangianFrame> {
        (self.frame_at)(t)
    }

    /// Frames at `t − h`, `t`, `t + h`, the outer two aligned to the middle.
    fn aligned_stencil(&self, t: f64, h: f64) -> Result<[LagrangianFrame; 3]> {
        if h <= 0.0 {
            return Err(Error::Invalid("difference step must be positive".into()));
        }
        let mid = self.frame_at(t)?;
        let plus = self.frame_at(t + h)?.aligned_to(&mid)?;
        let minus = self.frame_at(t - h)?.aligned_to(&mid)?;
        let distance = plus.distance(&mid).max(minus.distance(&mid));
        if distance > GAUGE_DISTANCE_LIMIT {
            return Err(Error::GaugeMisaligned { distance });
        }
        Ok([minus, mid, plus])
    }

    /// Central difference of the gauge-aligned frame vectors at `t`.
    pub fn frame_velocity(&self, t: f64, h: f64) -> Result<(LagrangianFrame, Vec<RealVector>)> {
        let [minus, mid, plus] = self.aligned_stencil(t, h)?;
        let velocity = plus
            .vectors
            .iter()
            .zip(&minus.vectors)
            .map(|(p, m)| (p - m) / (2.0 * h))
            .collect();
        Ok((mid, velocity))
    }
}

/// The symmetric form `S_v(X, Y) = ω(Ḃ X, Y)` expressed in the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannTangent {
    pub s: DMatrix<f64>,
}

impl GrassmannTangent {
    pub fn asymmetry(&self) -> f64 {
        (&self.s - self.s.transpose()).amax()
    }
}

/// `s_ij = ω(Δ_h v_i, v_j)` with `Δ_h` the central difference of the
/// gauge-aligned frame.
pub fn tangent_form(p: &PlanePath, t: f64, h: f64) -> Result<GrassmannTangent> {
    let (frame, velocity) = p.frame_velocity(t, h)?;
    let n = frame.n();
    let s = DMatrix::from_fn(n, n, |i, j| omega(&velocity[i], &frame.vectors[j]));
    Ok(GrassmannTangent { s })
}

/// Both sides of the pullback identity `(det²)^*(dθ/2π) = (1/π) J̃`:
/// `(d/dt arg det²)/2π` and `(1/π) Σ_i g(ψ(e_i), J e_i)` with `ψ` the
/// normal part of the frame velocity.
pub fn lemma2_sides(p: &PlanePath, t: f64, h: f64) -> Result<(f64, f64)> {
    let (frame, velocity) = p.frame_velocity(t, h)?;
    let forward = p.frame_at(t + h)?.det_squared();
    let backward = p.frame_at(t - h)?.det_squared();
    let phase_rate = (forward * backward.conj()).arg() / (2.0 * h);
    let trace: f64 = frame
        .vectors
        .iter()
        .zip(&velocity)
        .map(|(e, v)| frame.reject(v).dot(&j_apply(e)))
        .sum();
    Ok((phase_rate / (2.0 * PI), trace / PI))
}

pub fn lemma2_residual(p: &PlanePath, t: f64, h: f64) -> Result<f64> {
    let (lhs, rhs) = lemma2_sides(p, t, h)?;
    Ok((lhs - rhs).abs())
}
