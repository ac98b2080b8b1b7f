use serde::Serialize;
use thiserror::Error;

/// Failure of a CLI run, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unusable configuration: bad flags, bad shape or loop specs, bounds.
    #[error("{message}")]
    Config { reason: &'static str, message: String },

    #[error(transparent)]
    Core(#[from] maslov_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            reason: "config-error",
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 3,
            CliError::Core(maslov_core::Error::NonConvergent { .. }) => 2,
            CliError::Core(_) => 1,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 3,
        }
    }

    pub fn reason(&self) -> &'static str {
        match self {
            CliError::Config { reason, .. } => reason,
            CliError::Core(e) => e.reason(),
            CliError::Io(_) => "io-error",
            CliError::Csv(_) | CliError::Json(_) => "output-error",
        }
    }

    /// One-line JSON record for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: String,
            reason: &'a str,
            exit_code: i32,
        }
        serde_json::to_string(&Record {
            error: self.to_string(),
            reason: self.reason(),
            exit_code: self.exit_code(),
        })
        .unwrap_or_else(|_| format!("{{\"reason\":\"{}\"}}", self.reason()))
    }
}

/// Errors raised while the configuration is still being assembled are
/// configuration errors regardless of their origin.
pub(crate) fn as_config(e: maslov_core::Error) -> CliError {
    CliError::Config {
        reason: e.reason(),
        message: e.to_string(),
    }
}
