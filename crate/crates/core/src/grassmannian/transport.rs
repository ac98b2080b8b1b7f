//! Levi-Civita parallel transport of Lagrangian frames along ambient curves.
//!
//! Integrates `dV/ds + Γ(ẋ, V) = 0` for every frame vector with classical
//! fixed-step RK4. For a Kähler metric the transported frame stays
//! orthonormal and Lagrangian for `ω_g(u, v) = g(u, Jv)`; the result carries
//! the measured drift of both invariants at the endpoint.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grassmannian::LagrangianFrame;
use crate::linalg::symmetric_apply;
use crate::metric::{checked_matrix, Christoffel, MetricField};
use crate::symplectic::{j_matrix, RealVector};

/// Drift above which the result is flagged.
pub const DRIFT_WARNING: f64 = 1e-4;
const START_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct TransportResult {
    pub vectors: Vec<RealVector>,
    pub end_point: RealVector,
    pub orthonormality_residual: f64,
    pub lagrangian_residual: f64,
    pub drift_warning: bool,
}

impl TransportResult {
    pub fn drift(&self) -> f64 {
        self.orthonormality_residual.max(self.lagrangian_residual)
    }

    /// Validate the transported vectors as a frame of the flat structure.
    pub fn into_frame(self) -> Result<LagrangianFrame> {
        LagrangianFrame::new(self.vectors)
    }
}

/// `(max |g(v_i, v_j) − δ_ij|, max |g(v_i, J v_j)|)` for the metric matrix `g`.
pub fn frame_residuals(g: &DMatrix<f64>, vectors: &[RealVector]) -> (f64, f64) {
    let n = vectors.len();
    let gj = g * j_matrix(n);
    let mut ortho: f64 = 0.0;
    let mut lagr: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((a.dot(&(g * b)) - delta).abs());
            lagr = lagr.max(a.dot(&(&gj * b)).abs());
        }
    }
    (ortho, lagr)
}

/// Carry a flat Lagrangian frame to a frame that is orthonormal and
/// Lagrangian for `metric` at `x`, via `v ↦ G(x)^{-1/2} v`. Valid for
/// metrics commuting with `J`.
pub fn adapted_frame(
    metric: &dyn MetricField,
    x: &RealVector,
    frame: &LagrangianFrame,
) -> Result<Vec<RealVector>> {
    let g = checked_matrix(metric, x)?;
    let inv_sqrt = symmetric_apply(&g, |l| 1.0 / l.sqrt());
    Ok(frame.vectors().iter().map(|v| &inv_sqrt * v).collect())
}

/// Transport `f0` along `path: s ∈ [0, 1] ↦ (x(s), ẋ(s))` in `steps` RK4
/// steps.
pub fn parallel_transport_plane(
    metric: &dyn MetricField,
    path: &(dyn Fn(f64) -> (RealVector, RealVector) + Sync),
    f0: &[RealVector],
    steps: usize,
) -> Result<TransportResult> {
    if steps == 0 {
        return Err(Error::Invalid("transport needs at least one step".into()));
    }
    let (x0, _) = path(0.0);
    let dim = metric.real_dim();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: x0.len(),
        });
    }
    if f0.len() * 2 != dim || f0.iter().any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim / 2,
            actual: f0.len(),
        });
    }
    let g0 = checked_matrix(metric, &x0)?;
    let (ortho, lagr) = frame_residuals(&g0, f0);
    if ortho > START_TOL {
        return Err(Error::Invariant {
            invariant: "orthonormal at path start",
            residual: ortho,
            tolerance: START_TOL,
        });
    }
    if lagr > START_TOL {
        return Err(Error::Invariant {
            invariant: "lagrangian at path start",
            residual: lagr,
            tolerance: START_TOL,
        });
    }

    let mut vectors = f0.to_vec();
    if !metric.is_flat() {
        let rhs = |s: f64, vs: &[RealVector]| -> Result<Vec<RealVector>> {
            let (x, xdot) = path(s);
            let gamma = Christoffel::at(metric, &x)?;
            Ok(vs.iter().map(|v| -gamma.contract(&xdot, v)).collect())
        };
        let axpy = |vs: &[RealVector], ks: &[RealVector], c: f64| -> Vec<RealVector> {
            vs.iter().zip(ks).map(|(v, k)| v + k * c).collect()
        };
        let h = 1.0 / steps as f64;
        for step in 0..steps {
            let s = step as f64 * h;
            let k1 = rhs(s, &vectors)?;
            let k2 = rhs(s + 0.5 * h, &axpy(&vectors, &k1, 0.5 * h))?;
            let k3 = rhs(s + 0.5 * h, &axpy(&vectors, &k2, 0.5 * h))?;
            let k4 = rhs(s + h, &axpy(&vectors, &k3, h))?;
            for (i, v) in vectors.iter_mut().enumerate() {
                *v += (&k1[i] + &k2[i] * 2.0 + &k3[i] * 2.0 + &k4[i]) * (h / 6.0);
            }
        }
    }

    let (end_point, _) = path(1.0);
    let g1 = checked_matrix(metric, &end_point)?;
    let (orthonormality_residual, lagrangian_residual) = frame_residuals(&g1, &vectors);
    Ok(TransportResult {
        vectors,
        end_point,
        orthonormality_residual,
        lagrangian_residual,
        drift_warning: orthonormality_residual.max(lagrangian_residual) > DRIFT_WARNING,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Euclidean, FubiniStudy};
    use crate::random;
    use std::f64::consts::PI;

    fn quarter_circle(s: f64) -> (RealVector, RealVector) {
        let a = 0.5 * PI * s;
        let x = RealVector::from_column_slice(&[0.5 * a.cos(), 0.5 * a.sin(), 0.0, 0.0]);
        let v = RealVector::from_column_slice(&[-0.25 * PI * a.sin(), 0.25 * PI * a.cos(), 0.0, 0.0]);
        (x, v)
    }

    #[test]
    fn flat_transport_is_identity() {
        let mut rng = random::rng(1);
        let f0 = LagrangianFrame::from_unitary(&random::unitary(&mut rng, 2)).unwrap();
        let out =
            parallel_transport_plane(&Euclidean::new(2), &quarter_circle, f0.vectors(), 100).unwrap();
        assert_eq!(out.vectors, f0.vectors());
        assert!(!out.drift_warning);
        assert_eq!(out.into_frame().unwrap(), f0);
    }

    #[test]
    fn curved_transport_keeps_frame_lagrangian() {
        let fs = FubiniStudy::new(2, 1.0);
        let (x0, _) = quarter_circle(0.0);
        let f0 = adapted_frame(&fs, &x0, &LagrangianFrame::standard(2)).unwrap();
        let out = parallel_transport_plane(&fs, &quarter_circle, &f0, 400).unwrap();
        assert!(out.drift() < 1e-8, "drift {}", out.drift());
        // the frame genuinely moved
        let moved = out.vectors.iter().zip(&f0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(moved > 1e-3);
    }

    #[test]
    fn start_frame_must_match_metric() {
        let fs = FubiniStudy::new(2, 1.0);
        let f0 = LagrangianFrame::standard(2);
        let err = parallel_transport_plane(&fs, &quarter_circle, f0.vectors(), 10).unwrap_err();
        assert!(matches!(err, Error::Invariant { .. }));
    }
}
