//! Command implementations. Each returns an outcome that fixes the exit
//! code; hard failures surface as `CliError`.

use std::sync::Arc;

use maslov_core::grassmannian::{adapted_frame, parallel_transport_plane};
use maslov_core::immersion::{check_lagrangian, checked_jet, is_special, tangent_frame, Immersion, ShapeRegistry};
use maslov_core::maslov::{bump_family, metric_sweep, period_vector, MaslovReport, Status};
use maslov_core::metric::{Euclidean, FubiniStudy, MetricField};
use maslov_core::RealVector;
use serde::Serialize;

use crate::config::{Format, RunConfig, DEFAULT_GRID, DEFAULT_SWEEP_GRID};
use crate::error::{as_config, CliError};
use crate::loops::{parse_loop, resolve_loops};
use crate::output::Sink;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Verified,
    Failed,
    NonConvergent,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Verified => 0,
            Outcome::Failed => 1,
            Outcome::NonConvergent => 2,
        }
    }

    fn from_flag(ok: bool) -> Self {
        if ok {
            Outcome::Verified
        } else {
            Outcome::Failed
        }
    }

    fn status(self) -> &'static str {
        match self {
            Outcome::Verified => "verified",
            Outcome::Failed => "failed",
            Outcome::NonConvergent => "non-convergent",
        }
    }
}

fn build_shape(cfg: &RunConfig, registry: &ShapeRegistry) -> Result<(String, Box<dyn Immersion>), CliError> {
    let spec = cfg.shape()?;
    let imm = registry.build(spec, cfg.seed).map_err(as_config)?;
    Ok((spec.to_string(), imm))
}

#[derive(Serialize)]
struct CatalogRecord<'a> {
    id: &'a str,
    jets: &'a str,
    example: &'a str,
    summary: &'a str,
}

pub fn catalog(registry: &ShapeRegistry, sink: &mut Sink) -> Result<Outcome, CliError> {
    let rows: Vec<CatalogRecord> = registry
        .entries()
        .map(|f| CatalogRecord {
            id: f.id(),
            jets: f.jet_source().as_str(),
            example: f.example(),
            summary: f.summary(),
        })
        .collect();
    sink.records(&rows)?;
    Ok(Outcome::Verified)
}

#[derive(Serialize)]
struct CheckRecord {
    command: &'static str,
    shape: String,
    jets: &'static str,
    grid: usize,
    points: usize,
    lagrangian_residual: f64,
    tolerance: f64,
    special: Option<bool>,
    angle_spread: Option<f64>,
    max_mean_curvature: Option<f64>,
    status: &'static str,
}

pub fn check(cfg: &RunConfig, registry: &ShapeRegistry, sink: &mut Sink) -> Result<Outcome, CliError> {
    let (shape, imm) = build_shape(cfg, registry)?;
    let per_axis = cfg.grid.unwrap_or(DEFAULT_GRID);
    let grid = imm.domain().grid(per_axis);
    let residual = check_lagrangian(imm.as_ref(), &grid)?;
    let tolerance = imm.jet_source().lagrangian_tolerance();
    let outcome = Outcome::from_flag(residual <= tolerance);
    // the angle is only defined on Lagrangian tangent planes
    let special = match outcome {
        Outcome::Verified => Some(is_special(imm.as_ref(), &grid, 1e-8)?),
        _ => None,
    };
    sink.records(&[CheckRecord {
        command: "check",
        shape,
        jets: imm.jet_source().as_str(),
        grid: per_axis,
        points: grid.len(),
        lagrangian_residual: residual,
        tolerance,
        special: special.as_ref().map(|s| s.special),
        angle_spread: special.as_ref().map(|s| s.spread),
        max_mean_curvature: special.as_ref().map(|s| s.max_mean_curvature),
        status: outcome.status(),
    }])?;
    Ok(outcome)
}

#[derive(Serialize)]
struct TrackRow<'a> {
    shape: &'a str,
    #[serde(rename = "loop")]
    loop_id: &'a str,
    k: usize,
    t: f64,
    det2_re: f64,
    det2_im: f64,
    phase_rate: f64,
    integrand: f64,
}

fn track_rows(r: &MaslovReport) -> Vec<TrackRow<'_>> {
    (0..r.phase_rates.len())
        .map(|k| TrackRow {
            shape: &r.shape,
            loop_id: &r.loop_id,
            k,
            t: k as f64 / r.samples as f64,
            det2_re: r.angle_track[k].re,
            det2_im: r.angle_track[k].im,
            phase_rate: r.phase_rates[k],
            integrand: r.integrands[k],
        })
        .collect()
}

/// `index` and `theorem`: one report per loop. With CSV, `theorem` emits
/// the sampled angle track instead of the summary rows.
pub fn index(cfg: &RunConfig, registry: &ShapeRegistry, sink: &mut Sink, track: bool) -> Result<Outcome, CliError> {
    let (shape, imm) = build_shape(cfg, registry)?;
    let loops = resolve_loops(&cfg.loops, imm.as_ref())?;
    let tol = cfg.tol.unwrap_or_else(|| imm.jet_source().theorem_tolerance());
    let reports = loops
        .iter()
        .map(|lp| MaslovReport::compute(imm.as_ref(), &shape, lp, cfg.samples, tol))
        .collect::<Result<Vec<_>, _>>()?;
    if track && sink.format() == Format::Csv {
        let rows: Vec<TrackRow> = reports.iter().flat_map(track_rows).collect();
        sink.table(&rows)?;
    } else {
        sink.records(&reports)?;
    }
    Ok(if reports.iter().any(|r| r.status == Status::NonConvergent) {
        Outcome::NonConvergent
    } else {
        Outcome::from_flag(reports.iter().all(|r| r.status == Status::Verified))
    })
}

#[derive(Serialize)]
struct PeriodsRecord {
    shape: String,
    loops: Vec<String>,
    #[serde(rename = "N")]
    samples: usize,
    periods: Vec<i64>,
}

#[derive(Serialize)]
struct PeriodRow<'a> {
    shape: &'a str,
    #[serde(rename = "loop")]
    loop_id: &'a str,
    #[serde(rename = "N")]
    samples: usize,
    period: i64,
}

pub fn periods(cfg: &RunConfig, registry: &ShapeRegistry, sink: &mut Sink) -> Result<Outcome, CliError> {
    let (shape, imm) = build_shape(cfg, registry)?;
    let loops = if cfg.loops.is_empty() {
        maslov_core::maslov::generator_loops(imm.as_ref()).map_err(as_config)?
    } else {
        cfg.loops
            .iter()
            .map(|s| parse_loop(s, imm.as_ref()))
            .collect::<Result<_, _>>()?
    };
    let values = period_vector(imm.as_ref(), &loops, cfg.samples)?;
    let names: Vec<String> = loops.iter().map(|l| l.name().to_string()).collect();
    match sink.format() {
        Format::Jsonl => sink.json(&PeriodsRecord {
            shape,
            loops: names,
            samples: cfg.samples,
            periods: values,
        })?,
        Format::Csv => {
            let rows: Vec<PeriodRow> = names
                .iter()
                .zip(&values)
                .map(|(l, &p)| PeriodRow {
                    shape: &shape,
                    loop_id: l,
                    samples: cfg.samples,
                    period: p,
                })
                .collect();
            sink.table(&rows)?;
        }
    }
    Ok(Outcome::Verified)
}

type Family = Vec<(f64, Arc<dyn MetricField>)>;

/// `flat` or `bump:eps=a,b,...`.
pub fn parse_family(spec: &str, n: usize) -> Result<Family, CliError> {
    let spec = spec.trim();
    if spec == "flat" {
        return Ok(vec![(0.0, Arc::new(Euclidean::new(n)) as Arc<dyn MetricField>)]);
    }
    let list = spec
        .strip_prefix("bump:eps=")
        .ok_or_else(|| CliError::config(format!("unknown metric family `{spec}` (expected flat or bump:eps=<list>)")))?;
    let eps = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("metric family: `{s}` is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if eps.iter().any(|e| *e <= -1.0) {
        return Err(CliError::config("bump amplitude must exceed -1"));
    }
    Ok(bump_family(n, &eps))
}

#[derive(Serialize)]
struct SweepSummary {
    shape: String,
    grid: usize,
    argmin: Option<f64>,
}

pub fn sweep(cfg: &RunConfig, registry: &ShapeRegistry, sink: &mut Sink) -> Result<Outcome, CliError> {
    let (shape, imm) = build_shape(cfg, registry)?;
    let family_spec = cfg.metric_family.as_deref().unwrap_or("flat");
    let family = parse_family(family_spec, imm.n())?;
    let per_axis = cfg.grid.unwrap_or(DEFAULT_SWEEP_GRID);
    let grid = imm.domain().grid(per_axis);
    let table = metric_sweep(imm.as_ref(), &family, &grid)?;
    sink.records(&table.rows)?;
    if sink.format() == Format::Jsonl {
        sink.json(&SweepSummary {
            shape,
            grid: per_axis,
            argmin: table.argmin,
        })?;
    }
    Ok(Outcome::Verified)
}

#[derive(Serialize)]
struct TransportRecord {
    shape: String,
    #[serde(rename = "loop")]
    loop_id: String,
    metric: String,
    steps: usize,
    orthonormality_residual: f64,
    lagrangian_residual: f64,
    displacement: f64,
    drift_warning: bool,
    status: &'static str,
}

fn ambient_metric(name: &str, n: usize) -> Result<Box<dyn MetricField>, CliError> {
    match name {
        "flat" => Ok(Box::new(Euclidean::new(n))),
        "fubini-study" => Ok(Box::new(FubiniStudy::new(n, 1.0))),
        other => Err(CliError::config(format!(
            "unknown metric `{other}` (expected flat or fubini-study)"
        ))),
    }
}

/// Transport the tangent plane at the loop start along `f∘c`.
pub fn transport(cfg: &RunConfig, registry: &ShapeRegistry, sink: &mut Sink) -> Result<Outcome, CliError> {
    let (shape, imm) = build_shape(cfg, registry)?;
    let metric = ambient_metric(&cfg.metric, imm.n())?;
    let loops = resolve_loops(&cfg.loops, imm.as_ref())?;
    let mut records = Vec::new();
    let mut ok = true;
    for lp in &loops {
        // every jet the integrator can request lies on this grid or between
        for k in 0..=cfg.steps {
            checked_jet(imm.as_ref(), &lp.eval(k as f64 / cfg.steps as f64).0)?;
        }
        let path = |s: f64| {
            let (c, dc) = lp.eval(s);
            match imm.jet(&c) {
                Ok(jet) => {
                    let v = &jet.first * RealVector::from_vec(dc);
                    (jet.point, v)
                }
                Err(_) => {
                    let nan = RealVector::from_element(2 * imm.n(), f64::NAN);
                    (nan.clone(), nan)
                }
            }
        };
        let (c0, _) = lp.eval(0.0);
        let x0 = checked_jet(imm.as_ref(), &c0)?.point;
        let f0 = adapted_frame(metric.as_ref(), &x0, &tangent_frame(imm.as_ref(), &c0)?)?;
        let result = parallel_transport_plane(metric.as_ref(), &path, &f0, cfg.steps)?;
        let displacement = result
            .vectors
            .iter()
            .zip(&f0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let outcome = Outcome::from_flag(!result.drift_warning);
        ok &= outcome == Outcome::Verified;
        records.push(TransportRecord {
            shape: shape.clone(),
            loop_id: lp.name().to_string(),
            metric: metric.id(),
            steps: cfg.steps,
            orthonormality_residual: result.orthonormality_residual,
            lagrangian_residual: result.lagrangian_residual,
            displacement,
            drift_warning: result.drift_warning,
            status: outcome.status(),
        });
    }
    sink.records(&records)?;
    Ok(Outcome::from_flag(ok))
}
