//! Maslov index engines and the pointwise identity `μ = (1/π) i_H ω`.
//!
//! Two independent routes compute the index of a closed loop `γ`:
//!
//! * the **winding** engine unwraps the phase of `det²` of the Gauss map
//!   along `γ` and divides the total change by `2π`;
//! * the **integral** engine integrates `(1/π) ω(H, γ')` with the composite
//!   trapezoid rule, spectrally accurate for smooth periodic integrands.
//!
//! Their agreement, pointwise and integrated, is the quantity under test.

pub mod conjecture;
pub mod engines;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmannian::{maslov_map, LagrangianFrame};
use crate::immersion::{tangent_frame, Immersion, LoopPath, PointGeometry};
use crate::symplectic::{omega, RealVector};

pub use conjecture::{
    bump_family, closure_defect, compatible_from_metric, metric_sweep, CompatibleStructure, SweepRow,
    SweepTable,
};
pub use engines::{EngineRegistry, IndexEngine, IntegralEngine, WindingEngine};

/// Normalization constants. `det²` winding over `2π` is the index (the
/// generator of `H¹(S¹)` is `dθ/2π`); the mean-curvature integral carries
/// `1/π`. Their equality is the pullback identity for `det²` combined with
/// the mean-curvature representation.
pub mod constants {
    use std::f64::consts::PI;

    pub const WINDING_NORMALIZATION: f64 = 1.0 / (2.0 * PI);
    pub const INTEGRAL_NORMALIZATION: f64 = 1.0 / PI;
    /// Largest accepted phase step between consecutive samples.
    pub const PHASE_GUARD: f64 = PI / 2.0;
    pub const MIN_SAMPLES: usize = 16;
    pub const MAX_SAMPLES: usize = 1 << 20;
    /// Distance from an integer tolerated before rounding a winding.
    pub const INTEGRALITY_TOL: f64 = 1e-3;
    /// Relative projection residual above which a vector is not tangent.
    pub const TANGENCY_TOL: f64 = 1e-6;
}

use constants::*;

/// `(1/π) ω(H(u), X)` for a tangent vector `X` at `u`.
pub fn maslov_form_value(imm: &dyn Immersion, u: &[f64], x: &RealVector) -> Result<f64> {
    let geo = PointGeometry::flat(imm, u)?;
    if x.len() != geo.jet.point.len() {
        return Err(Error::DimensionMismatch {
            expected: geo.jet.point.len(),
            actual: x.len(),
        });
    }
    let projected = geo.frame.iter().fold(RealVector::zeros(x.len()), |acc, e| acc + e * e.dot(x));
    let residual = (x - projected).norm();
    if residual > TANGENCY_TOL * x.norm().max(1.0) {
        return Err(Error::NotTangent {
            location: u.to_vec(),
            residual,
        });
    }
    Ok(INTEGRAL_NORMALIZATION * omega(&geo.mean_curvature, x))
}

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::Invalid(format!(
            "at least {MIN_SAMPLES} loop samples are required, got {n}"
        )));
    }
    Ok(())
}

/// `(1/π) ω(H(c(t)), d/dt f(c(t)))`.
fn integrand(imm: &dyn Immersion, lp: &LoopPath, t: f64) -> Result<f64> {
    let (c, dc) = lp.eval(t);
    let geo = PointGeometry::flat(imm, &c)?;
    let velocity = &geo.jet.first * RealVector::from_vec(dc);
    Ok(INTEGRAL_NORMALIZATION * omega(&geo.mean_curvature, &velocity))
}

/// Composite trapezoid rule over `n` uniform samples of the periodic
/// integrand `(1/π) ω(H, (f∘c)')` on `[0, 1)`.
pub fn index_integral(imm: &dyn Immersion, lp: &LoopPath, n: usize) -> Result<f64> {
    check_samples(n)?;
    lp.validate(imm.domain())?;
    let values: Result<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| integrand(imm, lp, k as f64 / n as f64))
        .collect();
    Ok(values?.iter().sum::<f64>() / n as f64)
}

/// `det²` track of the Gauss map relative to `reference`, sampled at
/// `t_k = k/n`, `k = 0..=n`.
fn det2_track(
    imm: &dyn Immersion,
    lp: &LoopPath,
    n: usize,
    reference: &LagrangianFrame,
) -> Result<Vec<Complex<f64>>> {
    (0..=n)
        .into_par_iter()
        .map(|k| {
            let (c, _) = lp.eval(k as f64 / n as f64);
            maslov_map(&tangent_frame(imm, &c)?, reference)
        })
        .collect()
}

/// Unwrapped phases, or `None` when some step reaches the guard.
fn unwrap_phases(track: &[Complex<f64>]) -> Option<Vec<f64>> {
    let mut phases = Vec::with_capacity(track.len());
    let mut phase = track[0].arg();
    phases.push(phase);
    for pair in track.windows(2) {
        let step = (pair[1] * pair[0].conj()).arg();
        if step.abs() >= PHASE_GUARD {
            return None;
        }
        phase += step;
        phases.push(phase);
    }
    Some(phases)
}

/// The resolved `det²` track along a loop with its unwrapped phase.
#[derive(Debug, Clone)]
pub struct AngleTrack {
    /// Number of intervals; the track holds `samples + 1` points.
    pub samples: usize,
    pub values: Vec<Complex<f64>>,
    pub phases: Vec<f64>,
}

impl AngleTrack {
    /// Sample with doubling refinement until every phase step is below the
    /// guard.
    pub fn resolve(
        imm: &dyn Immersion,
        lp: &LoopPath,
        n: usize,
        reference: &LagrangianFrame,
    ) -> Result<Self> {
        check_samples(n)?;
        lp.validate(imm.domain())?;
        let mut samples = n;
        loop {
            let values = det2_track(imm, lp, samples, reference)?;
            if let Some(phases) = unwrap_phases(&values) {
                return Ok(Self {
                    samples,
                    values,
                    phases,
                });
            }
            if samples * 2 > MAX_SAMPLES {
                return Err(Error::NonConvergent { samples });
            }
            samples *= 2;
        }
    }

    pub fn total_phase(&self) -> f64 {
        self.phases[self.samples] - self.phases[0]
    }

    /// Total phase change over `2π`, before rounding.
    pub fn raw_winding(&self) -> f64 {
        WINDING_NORMALIZATION * self.total_phase()
    }

    pub fn winding(&self) -> Result<i64> {
        let w = self.raw_winding();
        let rounded = w.round();
        if (w - rounded).abs() > INTEGRALITY_TOL {
            return Err(Error::Invalid(format!(
                "det² track does not close: winding {w} is not an integer"
            )));
        }
        Ok(rounded as i64)
    }

    /// `(1/2π) dφ/dt` at `t_k`, `k = 0..samples`, by periodic central
    /// differences.
    pub fn phase_rate(&self) -> Vec<f64> {
        let n = self.samples;
        let total = self.total_phase();
        let dt = 1.0 / n as f64;
        (0..n)
            .map(|k| {
                let prev = if k == 0 {
                    self.phases[n - 1] - total
                } else {
                    self.phases[k - 1]
                };
                WINDING_NORMALIZATION * (self.phases[k + 1] - prev) / (2.0 * dt)
            })
            .collect()
    }
}

/// Winding number of `det²(A)` along the loop, `A` carrying `reference` to
/// the tangent plane.
pub fn index_winding(
    imm: &dyn Immersion,
    lp: &LoopPath,
    n: usize,
    reference: &LagrangianFrame,
) -> Result<i64> {
    AngleTrack::resolve(imm, lp, n, reference)?.winding()
}

/// Pointwise defect `max_k |(1/2π) Δ_t φ − (1/π) ω(H, (f∘c)')|`.
pub fn theorem_residual(imm: &dyn Immersion, lp: &LoopPath, n: usize) -> Result<f64> {
    let reference = LagrangianFrame::standard(imm.n());
    let track = AngleTrack::resolve(imm, lp, n, &reference)?;
    let integrands = integrand_samples(imm, lp, track.samples)?;
    Ok(max_defect(&track.phase_rate(), &integrands))
}

fn integrand_samples(imm: &dyn Immersion, lp: &LoopPath, n: usize) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|k| integrand(imm, lp, k as f64 / n as f64))
        .collect()
}

fn max_defect(rates: &[f64], integrands: &[f64]) -> f64 {
    rates
        .iter()
        .zip(integrands)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// One generator loop per periodic axis.
pub fn generator_loops(imm: &dyn Immersion) -> Result<Vec<LoopPath>> {
    imm.domain()
        .periodic_axes()
        .into_iter()
        .map(|a| LoopPath::generator(imm.domain(), a))
        .collect()
}

/// Maslov indices of a declared basis of loops, by the winding engine.
pub fn period_vector(imm: &dyn Immersion, basis: &[LoopPath], n: usize) -> Result<Vec<i64>> {
    let reference = LagrangianFrame::standard(imm.n());
    basis
        .iter()
        .map(|lp| index_winding(imm, lp, n, &reference))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Failed,
    NonConvergent,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Failed => "failed",
            Status::NonConvergent => "non-convergent",
        }
    }
}

/// Both engines and the pointwise defect for one (shape, loop) pair.
#[derive(Debug, Clone, Serialize)]
pub struct MaslovReport {
    pub shape: String,
    #[serde(rename = "loop")]
    pub loop_id: String,
    #[serde(rename = "N")]
    pub samples: usize,
    pub index_winding: Option<i64>,
    pub index_integral: Option<f64>,
    pub theorem_residual: Option<f64>,
    pub agreement: Option<f64>,
    pub status: Status,
    #[serde(skip)]
    pub angle_track: Vec<Complex<f64>>,
    #[serde(skip)]
    pub integrands: Vec<f64>,
    #[serde(skip)]
    pub phase_rates: Vec<f64>,
}

impl MaslovReport {
    /// Evaluate both engines. Non-convergent unwrapping yields a report
    /// with that status; other failures are errors.
    pub fn compute(
        imm: &dyn Immersion,
        shape: &str,
        lp: &LoopPath,
        n: usize,
        tol: f64,
    ) -> Result<Self> {
        let reference = LagrangianFrame::standard(imm.n());
        let empty = |samples| Self {
            shape: shape.to_string(),
            loop_id: lp.name().to_string(),
            samples,
            index_winding: None,
            index_integral: None,
            theorem_residual: None,
            agreement: None,
            status: Status::NonConvergent,
            angle_track: Vec::new(),
            integrands: Vec::new(),
            phase_rates: Vec::new(),
        };
        let track = match AngleTrack::resolve(imm, lp, n, &reference) {
            Ok(track) => track,
            Err(Error::NonConvergent { samples }) => return Ok(empty(samples)),
            Err(e) => return Err(e),
        };
        let winding = match track.winding() {
            Ok(w) => w,
            Err(Error::Invalid(_)) => return Ok(empty(track.samples)),
            Err(e) => return Err(e),
        };
        let integrands = integrand_samples(imm, lp, track.samples)?;
        let integral = integrands.iter().sum::<f64>() / track.samples as f64;
        let rates = track.phase_rate();
        let residual = max_defect(&rates, &integrands);
        let agreement = (integral - winding as f64).abs();
        let status = if agreement <= tol && residual <= tol {
            Status::Verified
        } else {
            Status::Failed
        };
        Ok(Self {
            shape: shape.to_string(),
            loop_id: lp.name().to_string(),
            samples: track.samples,
            index_winding: Some(winding),
            index_integral: Some(integral),
            theorem_residual: Some(residual),
            agreement: Some(agreement),
            status,
            angle_track: track.values,
            integrands,
            phase_rates: rates,
        })
    }
}

/// Lemma 4 defect `max |g(σ(X,Y), JZ) − g(σ(X,Z), JY)|` for tangent
/// coefficient vectors `X`, `Y`, `Z` at `u`.
pub fn cubic_form_asymmetry(imm: &dyn Immersion, u: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
    let geo = PointGeometry::flat(imm, u)?;
    let tangent = |c: &[f64]| &geo.jet.first * RealVector::from_column_slice(c);
    let (ty, tz) = (tangent(y), tangent(z));
    let lhs = geo.sigma.apply(x, y).dot(&crate::symplectic::j_apply(&tz));
    let rhs = geo.sigma.apply(x, z).dot(&crate::symplectic::j_apply(&ty));
    Ok((lhs - rhs).abs())
}

/// `|H|` at `u`.
pub fn mean_curvature_norm(imm: &dyn Immersion, u: &[f64]) -> Result<f64> {
    Ok(PointGeometry::flat(imm, u)?.mean_curvature.norm())
}

/// Real `n x n` matrix of `ω` restricted to the tangent plane at `u`.
pub fn restricted_omega(imm: &dyn Immersion, u: &[f64]) -> Result<DMatrix<f64>> {
    let geo = PointGeometry::flat(imm, u)?;
    let t = geo.jet.tangents();
    Ok(DMatrix::from_fn(t.len(), t.len(), |a, b| omega(&t[a], &t[b])))
}
