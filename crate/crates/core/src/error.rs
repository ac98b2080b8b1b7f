use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A frame or structure failed one of its defining invariants.
    #[error("invariant `{invariant}` violated: residual {residual:e} exceeds {tolerance:e}")]
    Invariant {
        invariant: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("rank-deficient differential at u = {location:?} (smallest singular value {singular_value:e})")]
    RankDeficient {
        location: Vec<f64>,
        singular_value: f64,
    },

    #[error("vector is not tangent at u = {location:?} (projection residual {residual:e})")]
    NotTangent { location: Vec<f64>, residual: f64 },

    #[error("gauge misalignment between consecutive frames (distance {distance:.3}); refine the step")]
    GaugeMisaligned { distance: f64 },

    #[error("metric is not positive definite at x = {location:?}")]
    MetricNotPositive { location: Vec<f64> },

    #[error("phase unwrapping did not converge with {samples} samples")]
    NonConvergent { samples: usize },

    #[error("loop is not closed: endpoint defect {defect:e} on axis {axis}")]
    OpenLoop { axis: usize, defect: f64 },

    #[error("{0}")]
    Parse(#[from] crate::expr::ParseError),

    #[error("{0}")]
    Eval(#[from] crate::expr::EvalError),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Short machine-readable reason code.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::Invariant { .. } => "invariant-violated",
            Error::RankDeficient { .. } => "rank-deficient",
            Error::NotTangent { .. } => "not-tangent",
            Error::GaugeMisaligned { .. } => "refinement-required",
            Error::MetricNotPositive { .. } => "metric-not-positive",
            Error::NonConvergent { .. } => "non-convergent",
            Error::OpenLoop { .. } => "open-loop",
            Error::Parse(_) => "parse-error",
            Error::Eval(_) => "evaluation-error",
            Error::Invalid(_) => "invalid-input",
        }
    }
}
