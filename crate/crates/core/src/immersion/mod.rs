//! Parametric Lagrangian immersions and their extrinsic geometry.
//!
//! An immersion is a map from an `n`-dimensional parameter box into
//! `R^{2n}` that exposes second-order jets. From the jet at a point we get
//! the Gauss map (an orthonormal tangent frame in fixed column order), the
//! induced metric, the second fundamental form (normal part of the second
//! derivatives), the mean curvature vector and the Lagrangian angle
//! `det²` of the tangent plane.

pub mod catalog;
pub mod loops;
pub mod registry;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grassmannian::LagrangianFrame;
use crate::linalg::{gram_schmidt, min_singular_value};
use crate::metric::{Christoffel, MetricField};
use crate::symplectic::{omega, AmbientSpace, RealVector};

pub use catalog::{Circle, ExpressionImmersion, ExpressionShape, LinearPlane, Line, ProductTorus};
pub use loops::LoopPath;
pub use registry::{ShapeFactory, ShapeRegistry, ShapeSpec};

/// Smallest singular value of `Df` below which a point is rank deficient.
pub const RANK_TOL: f64 = 1e-8;

/// Where the jets of an immersion come from; fixes the tolerance tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetSource {
    Analytic,
    FiniteDifference,
}

impl JetSource {
    /// Bound on `|ω(∂_a f, ∂_b f)|` for a valid Lagrangian immersion.
    pub fn lagrangian_tolerance(self) -> f64 {
        match self {
            JetSource::Analytic => 1e-9,
            JetSource::FiniteDifference => 1e-5,
        }
    }

    /// Default bound on pointwise theorem residuals and engine agreement.
    pub fn theorem_tolerance(self) -> f64 {
        match self {
            JetSource::Analytic => 1e-6,
            JetSource::FiniteDifference => 1e-3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            JetSource::Analytic => "analytic",
            JetSource::FiniteDifference => "finite-difference",
        }
    }
}

/// Parameter box with per-axis periodicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, periodic: Vec<bool>) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() != periodic.len() {
            return Err(Error::Invalid("domain bounds have mismatched lengths".into()));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a < b)) {
            return Err(Error::Invalid("domain box must have positive extent".into()));
        }
        Ok(Self {
            lower,
            upper,
            periodic,
        })
    }

    /// `[0, 2π)^n`, every axis periodic.
    pub fn torus(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            upper: vec![std::f64::consts::TAU; n],
            periodic: vec![true; n],
        }
    }

    /// `[-1, 1]^n`, no periodic axes.
    pub fn unit_box(n: usize) -> Self {
        Self {
            lower: vec![-1.0; n],
            upper: vec![1.0; n],
            periodic: vec![false; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn period(&self, axis: usize) -> Option<f64> {
        self.periodic[axis].then(|| self.upper[axis] - self.lower[axis])
    }

    pub fn periodic_axes(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&a| self.periodic[a]).collect()
    }

    /// Base point of generator loops: lower corner on periodic axes,
    /// centre on the others.
    pub fn base_point(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|a| {
                if self.periodic[a] {
                    self.lower[a]
                } else {
                    0.5 * (self.lower[a] + self.upper[a])
                }
            })
            .collect()
    }

    /// Uniform tensor grid with `per_axis` samples per axis. Periodic axes
    /// omit the duplicated endpoint; other axes stay strictly inside.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let per_axis = per_axis.max(1);
        let axis_points: Vec<Vec<f64>> = (0..self.dim())
            .map(|a| {
                let (lo, hi) = (self.lower[a], self.upper[a]);
                (0..per_axis)
                    .map(|k| {
                        if self.periodic[a] {
                            lo + (hi - lo) * k as f64 / per_axis as f64
                        } else {
                            lo + (hi - lo) * (k as f64 + 0.5) / per_axis as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let mut points = vec![Vec::new()];
        for axis in axis_points {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        points
    }
}

/// Position and first and second derivatives at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub point: RealVector,
    /// `2n x n`, column `a` is `∂_a f`.
    pub first: DMatrix<f64>,
    /// `∂_a ∂_b f` stored at `a * n + b`.
    pub second: Vec<RealVector>,
}

impl Jet {
    pub fn n(&self) -> usize {
        self.first.ncols()
    }

    pub fn d(&self, a: usize) -> RealVector {
        self.first.column(a).into_owned()
    }

    pub fn dd(&self, a: usize, b: usize) -> &RealVector {
        &self.second[a * self.n() + b]
    }

    pub fn tangents(&self) -> Vec<RealVector> {
        (0..self.n()).map(|a| self.d(a)).collect()
    }
}

pub trait Immersion: Send + Sync {
    /// Complex dimension of the ambient, equal to the dimension of `Λ`.
    fn n(&self) -> usize;

    fn domain(&self) -> &Domain;

    fn jet(&self, u: &[f64]) -> Result<Jet>;

    fn jet_source(&self) -> JetSource {
        JetSource::Analytic
    }

    fn ambient(&self) -> AmbientSpace {
        AmbientSpace::new(self.n()).expect("positive dimension")
    }

    /// Coordinate expressions of the same map, used to re-ingest catalog
    /// shapes with finite-difference jets.
    fn expression_form(&self) -> Option<ExpressionShape> {
        None
    }
}

/// Jet at `u` after the rank check.
pub fn checked_jet(imm: &dyn Immersion, u: &[f64]) -> Result<Jet> {
    if u.len() != imm.n() {
        return Err(Error::DimensionMismatch {
            expected: imm.n(),
            actual: u.len(),
        });
    }
    let jet = imm.jet(u)?;
    let s = min_singular_value(&jet.first);
    if !(s > RANK_TOL) {
        return Err(Error::RankDeficient {
            location: u.to_vec(),
            singular_value: s,
        });
    }
    Ok(jet)
}

/// Extrinsic data at one point, computed with respect to a metric on the
/// ambient (flat unless stated otherwise).
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub jet: Jet,
    pub metric: DMatrix<f64>,
    /// Orthonormal frame of the tangent plane in the ambient metric.
    pub frame: Vec<RealVector>,
    pub induced: DMatrix<f64>,
    pub sigma: SecondFundamental,
    pub mean_curvature: RealVector,
}

impl PointGeometry {
    pub fn flat(imm: &dyn Immersion, u: &[f64]) -> Result<Self> {
        let jet = checked_jet(imm, u)?;
        let dim = jet.point.len();
        Self::assemble(jet, DMatrix::identity(dim, dim), None)
    }

    /// Geometry for the ambient metric `metric`, including the Christoffel
    /// correction `∇_{∂a} ∂_b f = ∂_a ∂_b f + Γ(∂_a f, ∂_b f)`.
    pub fn with_metric(imm: &dyn Immersion, u: &[f64], metric: &dyn MetricField) -> Result<Self> {
        let jet = checked_jet(imm, u)?;
        let gamma = Christoffel::at(metric, &jet.point)?;
        let g = gamma.metric().clone();
        Self::assemble(jet, g, Some(&gamma))
    }

    fn assemble(jet: Jet, g: DMatrix<f64>, gamma: Option<&Christoffel>) -> Result<Self> {
        let n = jet.n();
        let tangents = jet.tangents();
        let frame = gram_schmidt(&tangents, Some(&g))?;
        let induced = DMatrix::from_fn(n, n, |a, b| tangents[a].dot(&(&g * &tangents[b])));
        let reject = |v: &RealVector| {
            frame
                .iter()
                .fold(v.clone(), |acc, e| acc - e * e.dot(&(&g * v)))
        };
        let mut sigma = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut second = jet.dd(a, b).clone();
                if let Some(gamma) = gamma {
                    second += gamma.contract(&tangents[a], &tangents[b]);
                }
                sigma.push(reject(&second));
            }
        }
        let inverse = induced
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Invalid("induced metric is singular".into()))?;
        let dim = jet.point.len();
        let mut h = RealVector::zeros(dim);
        for a in 0..n {
            for b in 0..n {
                h += &sigma[a * n + b] * inverse[(a, b)];
            }
        }
        Ok(Self {
            jet,
            metric: g,
            frame,
            induced,
            sigma: SecondFundamental { n, sigma },
            mean_curvature: h,
        })
    }
}

/// Normal-valued symmetric form `σ(∂_a f, ∂_b f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFundamental {
    n: usize,
    sigma: Vec<RealVector>,
}

impl SecondFundamental {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> &RealVector {
        &self.sigma[a * self.n + b]
    }

    /// `σ(X, Y)` for `X = Σ x_a ∂_a f`, `Y = Σ y_b ∂_b f`.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> RealVector {
        let dim = self.sigma[0].len();
        let mut out = RealVector::zeros(dim);
        for a in 0..self.n {
            for b in 0..self.n {
                out += self.get(a, b) * (x[a] * y[b]);
            }
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.sigma.iter().map(|s| s.norm_squared()).sum::<f64>().sqrt()
    }
}

/// `max_{a<b} |ω(∂_a f, ∂_b f)|` over the grid.
pub fn check_lagrangian(imm: &dyn Immersion, grid: &[Vec<f64>]) -> Result<f64> {
    let residuals: Result<Vec<f64>> = grid
        .par_iter()
        .map(|u| {
            let jet = checked_jet(imm, u)?;
            let tangents = jet.tangents();
            let mut worst: f64 = 0.0;
            for a in 0..tangents.len() {
                for b in a + 1..tangents.len() {
                    worst = worst.max(omega(&tangents[a], &tangents[b]).abs());
                }
            }
            Ok(worst)
        })
        .collect();
    Ok(residuals?.into_iter().fold(0.0, f64::max))
}

/// Gauss map: Gram-Schmidt of `∂_1 f, ..., ∂_n f` in that order.
pub fn tangent_frame(imm: &dyn Immersion, u: &[f64]) -> Result<LagrangianFrame> {
    let jet = checked_jet(imm, u)?;
    let vectors = gram_schmidt(&jet.tangents(), None)?;
    LagrangianFrame::with_lagrangian_tolerance(vectors, imm.jet_source().lagrangian_tolerance())
}

pub fn induced_metric(imm: &dyn Immersion, u: &[f64]) -> Result<DMatrix<f64>> {
    let jet = checked_jet(imm, u)?;
    Ok(jet.first.transpose() * &jet.first)
}

pub fn second_fundamental(imm: &dyn Immersion, u: &[f64]) -> Result<SecondFundamental> {
    Ok(PointGeometry::flat(imm, u)?.sigma)
}

/// `H = (j*g)^{ab} σ_ab`.
pub fn mean_curvature(imm: &dyn Immersion, u: &[f64]) -> Result<RealVector> {
    Ok(PointGeometry::flat(imm, u)?.mean_curvature)
}

/// Mean curvature with respect to an arbitrary ambient metric.
pub fn mean_curvature_with(
    imm: &dyn Immersion,
    u: &[f64],
    metric: &dyn MetricField,
) -> Result<RealVector> {
    Ok(PointGeometry::with_metric(imm, u, metric)?.mean_curvature)
}

/// `e^{2iθ(u)} = det²` of the tangent plane.
pub fn lagrangian_angle(imm: &dyn Immersion, u: &[f64]) -> Result<Complex<f64>> {
    Ok(tangent_frame(imm, u)?.det_squared())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecialReport {
    pub special: bool,
    /// Largest angular distance of the Lagrangian angle from its mean.
    pub spread: f64,
    /// `max |H|` over the grid.
    pub max_mean_curvature: f64,
}

/// Constant Lagrangian angle test, with `|H|` reported as a cross-check.
pub fn is_special(imm: &dyn Immersion, grid: &[Vec<f64>], tol: f64) -> Result<SpecialReport> {
    if grid.is_empty() {
        return Err(Error::Invalid("sampling grid is empty".into()));
    }
    let samples: Result<Vec<(Complex<f64>, f64)>> = grid
        .par_iter()
        .map(|u| {
            let geo = PointGeometry::flat(imm, u)?;
            let angle = lagrangian_angle(imm, u)?;
            Ok((angle, geo.mean_curvature.norm()))
        })
        .collect();
    let samples = samples?;
    let mean: Complex<f64> = samples.iter().map(|(z, _)| z).sum::<Complex<f64>>() / samples.len() as f64;
    let spread = if mean.norm() < 1e-6 {
        std::f64::consts::PI
    } else {
        let unit = mean / mean.norm();
        samples
            .iter()
            .map(|(z, _)| (z * unit.conj()).arg().abs())
            .fold(0.0, f64::max)
    };
    let max_mean_curvature = samples.iter().map(|(_, h)| *h).fold(0.0, f64::max);
    Ok(SpecialReport {
        special: spread <= tol,
        spread,
        max_mean_curvature,
    })
}
