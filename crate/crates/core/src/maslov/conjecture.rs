//! Compatible almost-complex structures induced by auxiliary metrics and
//! the closure test for the mean-curvature one-form they produce.
//!
//! Given a metric `h` on `R^{2n}`, let `A` be defined by
//! `ω(u, v) = h(u, A v)`. The polar part `J = A (−A²)^{-1/2}` is an
//! almost-complex structure compatible with `ω`, and
//! `g_J(u, v) = ω(J u, v)` is a Riemannian metric. Any `J0`-invariant `h`
//! yields `J = J0` and the flat metric.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::immersion::{checked_jet, mean_curvature_with, Immersion};
use crate::linalg::{symmetric_apply, symmetrize};
use crate::metric::{checked_matrix, BumpMetric, MetricField};
use crate::symplectic::{j_matrix, omega, RealVector};

/// Bound on the invariant residuals of an induced structure.
pub const COMPATIBILITY_TOL: f64 = 1e-9;
/// Central-difference step of the curl of the mean-curvature form.
pub const CURL_STEP: f64 = 1e-4;

/// `J` and `g_J` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureAt {
    pub j: DMatrix<f64>,
    pub metric: DMatrix<f64>,
}

/// Residuals of `J² = −I`, `J^T J0 J = J0` and symmetry of `g_J`, plus the
/// smallest eigenvalue of `g_J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub square: f64,
    pub symplectic: f64,
    pub symmetry: f64,
    pub min_eigenvalue: f64,
}

impl Residuals {
    pub fn worst(&self) -> f64 {
        self.square.max(self.symplectic).max(self.symmetry)
    }
}

/// The almost-complex structure `J` determined by `ω` and a metric `h`.
#[derive(Clone)]
pub struct CompatibleStructure {
    h: Arc<dyn MetricField>,
}

impl std::fmt::Debug for CompatibleStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompatibleStructure").field("h", &self.h.id()).finish()
    }
}

impl CompatibleStructure {
    pub fn source(&self) -> &dyn MetricField {
        self.h.as_ref()
    }

    pub fn at(&self, x: &RealVector) -> Result<StructureAt> {
        let h = checked_matrix(self.h.as_ref(), x)?;
        let dim = h.nrows();
        let l = symmetric_apply(&h, f64::sqrt);
        let l_inv = symmetric_apply(&h, |s| 1.0 / s.sqrt());
        let j0 = j_matrix(dim / 2);
        let a = &l_inv * &j0 * &l_inv;
        let minus_sq = symmetrize(&(-(&a * &a)));
        let q = symmetric_apply(&minus_sq, f64::sqrt);
        let q_inv = symmetric_apply(&minus_sq, |s| 1.0 / s.sqrt());
        let j = &l_inv * &a * &q_inv * &l;
        let metric = symmetrize(&(&l * &q * &l));
        Ok(StructureAt { j, metric })
    }

    pub fn j_at(&self, x: &RealVector) -> Result<DMatrix<f64>> {
        Ok(self.at(x)?.j)
    }

    pub fn residuals(&self, x: &RealVector) -> Result<Residuals> {
        let StructureAt { j, metric } = self.at(x)?;
        let dim = j.nrows();
        let id = DMatrix::<f64>::identity(dim, dim);
        let j0 = j_matrix(dim / 2);
        let square = (&j * &j + &id).amax();
        let symplectic = (j.transpose() * &j0 * &j - &j0).amax();
        // g_J(u, v) = ω(Ju, v) as assembled from J directly
        let direct = j.transpose() * &j0;
        let symmetry = (&direct - direct.transpose()).amax().max((&direct - &metric).amax());
        let min_eigenvalue = metric.clone().symmetric_eigenvalues().min();
        Ok(Residuals {
            square,
            symplectic,
            symmetry,
            min_eigenvalue,
        })
    }
}

impl MetricField for CompatibleStructure {
    fn real_dim(&self) -> usize {
        self.h.real_dim()
    }

    fn matrix_at(&self, x: &RealVector) -> DMatrix<f64> {
        match self.at(x) {
            Ok(s) => s.metric,
            Err(_) => DMatrix::from_element(x.len(), x.len(), f64::NAN),
        }
    }

    fn is_flat(&self) -> bool {
        self.h.is_flat()
    }

    fn id(&self) -> String {
        format!("g_J[{}]", self.h.id())
    }
}

/// Build the structure of `h`, checking the invariants at each sample.
pub fn compatible_from_metric(
    h: Arc<dyn MetricField>,
    samples: &[RealVector],
) -> Result<CompatibleStructure> {
    if !h.real_dim().is_multiple_of(2) || h.real_dim() == 0 {
        return Err(Error::Invalid(format!(
            "metric dimension {} is not a positive even number",
            h.real_dim()
        )));
    }
    let cs = CompatibleStructure { h };
    for x in samples {
        let r = cs.residuals(x)?;
        if r.worst() > COMPATIBILITY_TOL {
            return Err(Error::Invariant {
                invariant: "compatible structure",
                residual: r.worst(),
                tolerance: COMPATIBILITY_TOL,
            });
        }
        if !(r.min_eigenvalue > 0.0) {
            return Err(Error::MetricNotPositive {
                location: x.iter().copied().collect(),
            });
        }
    }
    Ok(cs)
}

/// `β_a(u) = ω(H_J(u), ∂_a f(u))`.
fn mean_curvature_form(imm: &dyn Immersion, cs: &CompatibleStructure, u: &[f64]) -> Result<RealVector> {
    let h = mean_curvature_with(imm, u, cs)?;
    let jet = checked_jet(imm, u)?;
    Ok(RealVector::from_fn(imm.n(), |a, _| omega(&h, &jet.d(a))))
}

/// `max |∂_a β_b − ∂_b β_a|` over the grid; zero for curves.
pub fn closure_defect(imm: &dyn Immersion, cs: &CompatibleStructure, grid: &[Vec<f64>]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Invalid("closure defect needs a non-empty grid".into()));
    }
    let n = imm.n();
    if cs.real_dim() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            actual: cs.real_dim(),
        });
    }
    if n == 1 {
        return Ok(0.0);
    }
    let defects: Result<Vec<f64>> = grid
        .par_iter()
        .map(|u| {
            // derivative of β along each axis
            let mut grad = Vec::with_capacity(n);
            for a in 0..n {
                let shifted = |s: f64| {
                    let mut v = u.clone();
                    v[a] += s;
                    mean_curvature_form(imm, cs, &v)
                };
                grad.push((shifted(CURL_STEP)? - shifted(-CURL_STEP)?) / (2.0 * CURL_STEP));
            }
            let mut worst: f64 = 0.0;
            for a in 0..n {
                for b in a + 1..n {
                    worst = worst.max((grad[a][b] - grad[b][a]).abs());
                }
            }
            Ok(worst)
        })
        .collect();
    Ok(defects?.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub metric: String,
    pub defect: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Parameter with the smallest defect among rows that evaluated.
    pub argmin: Option<f64>,
}

/// One-parameter family of bump metrics on `R^{2n}`.
pub fn bump_family(n: usize, eps: &[f64]) -> Vec<(f64, Arc<dyn MetricField>)> {
    eps.iter()
        .map(|&e| (e, Arc::new(BumpMetric::new(n, e)) as Arc<dyn MetricField>))
        .collect()
}

/// Closure defect of `H_{g_J}` for each member of a metric family.
/// Members that fail to produce a valid structure are reported per row.
pub fn metric_sweep(
    imm: &dyn Immersion,
    family: &[(f64, Arc<dyn MetricField>)],
    grid: &[Vec<f64>],
) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::Invalid("metric sweep needs a non-empty grid".into()));
    }
    if family.is_empty() {
        return Err(Error::Invalid("metric sweep needs at least one metric".into()));
    }
    let images: Vec<RealVector> = grid
        .iter()
        .map(|u| checked_jet(imm, u).map(|j| j.point))
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = family
        .iter()
        .map(|(param, h)| {
            let result = compatible_from_metric(Arc::clone(h), &images)
                .and_then(|cs| closure_defect(imm, &cs, grid));
            let (defect, error) = match result {
                Ok(d) => (Some(d), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepRow {
                param: *param,
                metric: h.id(),
                defect,
                error,
            }
        })
        .collect();
    let argmin = rows
        .iter()
        .filter_map(|r| r.defect.map(|d| (r.param, d)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(p, _)| p);
    Ok(SweepTable { rows, argmin })
}
