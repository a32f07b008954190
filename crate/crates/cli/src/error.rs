use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse {origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("missing required fields: {}", .0.join(", "))]
    MissingFields(Vec<&'static str>),
    #[error("invalid `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("bad input data: {0}")]
    Input(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] superengine::Error),
}

impl CliError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "config_parse",
            CliError::MissingFields(_) => "missing_fields",
            CliError::InvalidConfig { .. } => "invalid_config",
            CliError::Io { .. } => "io",
            CliError::Input(_) => "invalid_input",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
            CliError::Core(e) => e.kind(),
        }
    }

    /// `{"error": kind, "message": text}` on one line.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
