//! Run configuration: TOML file merged with command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use maslov_core::immersion::ShapeSpec;
use maslov_core::maslov::constants::MIN_SAMPLES;
use serde::Deserialize;

use crate::error::{as_config, CliError};

pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_GRID: usize = 16;
pub const DEFAULT_SWEEP_GRID: usize = 6;
pub const DEFAULT_STEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// TOML run configuration; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Shape spec, e.g. `circle:r=1` or `product-torus:r1=1,r2=0.5`
    #[arg(long, global = true)]
    pub shape: Option<String>,

    /// Loop spec: `full`, `gen:k`, `expr:c1|c2`, optionally prefixed by `rev:`
    #[arg(long = "loop", global = true)]
    pub loops: Vec<String>,

    /// Loop samples N (at least 16)
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Tolerance for engine agreement and the pointwise residual
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Omit wall-clock timestamps so output is byte-reproducible
    #[arg(long, global = true)]
    pub no_timestamps: bool,

    /// Auxiliary metric family for `sweep`, e.g. `bump:eps=0,0.05,0.1`
    #[arg(long, global = true)]
    pub metric_family: Option<String>,

    /// Grid points per parameter axis for `check` and `sweep`
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Ambient metric for `transport`: `flat` or `fubini-study`
    #[arg(long, global = true)]
    pub metric: Option<String>,

    /// RK4 steps for `transport`
    #[arg(long, global = true)]
    pub steps: Option<usize>,
}

/// A shape in a config file: either a spec string or a table.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ShapeEntry {
    Spec(String),
    Table(BTreeMap<String, toml::Value>),
}

impl ShapeEntry {
    fn to_spec(&self) -> Result<ShapeSpec, CliError> {
        match self {
            ShapeEntry::Spec(s) => s.parse().map_err(as_config),
            ShapeEntry::Table(t) => {
                let id = match t.get("id") {
                    Some(toml::Value::String(id)) => id.clone(),
                    _ => return Err(CliError::config("shape table needs a string `id`")),
                };
                let mut params = BTreeMap::new();
                for (k, v) in t.iter().filter(|(k, _)| k.as_str() != "id") {
                    params.insert(k.clone(), scalar_text(v, k)?);
                }
                Ok(ShapeSpec { id, params })
            }
        }
    }
}

fn scalar_text(v: &toml::Value, key: &str) -> Result<String, CliError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(format!("{f:?}")),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        toml::Value::Array(items) => Ok(items
            .iter()
            .map(|x| scalar_text(x, key))
            .collect::<Result<Vec<_>, _>>()?
            .join("|")),
        _ => Err(CliError::config(format!("shape parameter `{key}` has an unsupported type"))),
    }
}

/// Config file schema, see `docs/config.md`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub shape: Option<ShapeEntry>,
    #[serde(default)]
    pub loops: Vec<String>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub no_timestamps: Option<bool>,
    pub metric_family: Option<String>,
    pub grid: Option<usize>,
    pub metric: Option<String>,
    pub steps: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("config {}: {e}", path.display())))
    }
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub shape: Option<ShapeSpec>,
    pub loops: Vec<String>,
    pub samples: usize,
    /// `None` selects the jet-source default.
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub timestamps: bool,
    pub metric_family: Option<String>,
    pub grid: Option<usize>,
    pub metric: String,
    pub steps: usize,
}

impl RunConfig {
    pub fn resolve(opts: &Options) -> Result<Self, CliError> {
        let file = match &opts.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let shape = match (&opts.shape, &file.shape) {
            (Some(s), _) => Some(s.parse().map_err(as_config)?),
            (None, Some(entry)) => Some(entry.to_spec()?),
            (None, None) => None,
        };
        let cfg = Self {
            shape,
            loops: if opts.loops.is_empty() { file.loops } else { opts.loops.clone() },
            samples: opts.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            tol: opts.tol.or(file.tol),
            out: opts.out.clone().or(file.out),
            format: opts.format.or(file.format).unwrap_or_default(),
            seed: opts.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            timestamps: !(opts.no_timestamps || file.no_timestamps.unwrap_or(false)),
            metric_family: opts.metric_family.clone().or(file.metric_family),
            grid: opts.grid.or(file.grid),
            metric: opts.metric.clone().or(file.metric).unwrap_or_else(|| "flat".into()),
            steps: opts.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.samples < MIN_SAMPLES {
            return Err(CliError::config(format!(
                "--samples must be at least {MIN_SAMPLES}, got {}",
                self.samples
            )));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::config(format!("--tol must be positive, got {tol}")));
            }
        }
        if self.grid == Some(0) {
            return Err(CliError::config("--grid must be positive"));
        }
        if self.steps == 0 {
            return Err(CliError::config("--steps must be positive"));
        }
        Ok(())
    }

    pub fn shape(&self) -> Result<&ShapeSpec, CliError> {
        self.shape
            .as_ref()
            .ok_or_else(|| CliError::config("this command needs --shape"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Options {
        Options::default()
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(&opts()).unwrap();
        assert_eq!(cfg.samples, DEFAULT_SAMPLES);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.format, Format::Jsonl);
        assert!(cfg.timestamps);
        assert!(cfg.shape().is_err());
    }

    #[test]
    fn shape_tables_become_specs() {
        let file: FileConfig = toml::from_str(
            "[shape]\nid = \"expr\"\ncoords = [\"cos(u1)\", \"sin(u1)\"]\nperiod = \"2*pi\"\n",
        )
        .unwrap();
        let spec = file.shape.unwrap().to_spec().unwrap();
        assert_eq!(spec.to_string(), "expr:coords=cos(u1)|sin(u1),period=2*pi");

        let file: FileConfig = toml::from_str("[shape]\nid = \"product-torus\"\nr1 = 1\nr2 = 0.5\n").unwrap();
        assert_eq!(file.shape.unwrap().to_spec().unwrap().to_string(), "product-torus:r1=1,r2=0.5");
    }

    #[test]
    fn bounds_are_validated() {
        let o = Options {
            samples: Some(15),
            ..opts()
        };
        assert!(matches!(RunConfig::resolve(&o), Err(CliError::Config { .. })));
        let o = Options {
            tol: Some(-1.0),
            ..opts()
        };
        assert_eq!(RunConfig::resolve(&o).unwrap_err().exit_code(), 3);
        let o = Options {
            grid: Some(0),
            ..opts()
        };
        assert!(RunConfig::resolve(&o).is_err());
    }
}
