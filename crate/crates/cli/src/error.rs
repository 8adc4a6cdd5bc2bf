use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] iwasawa_core::Error),

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// `2` for malformed requests and exhausted resources, `1` for
    /// mathematical findings surfaced as errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_usage_or_resource() => match e {
                iwasawa_core::Error::TheoremViolation(_)
                | iwasawa_core::Error::UniquenessScan(_)
                | iwasawa_core::Error::Consistency(_)
                | iwasawa_core::Error::Calibration(_) => 1,
                _ => 2,
            },
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Serialize(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Serialize(e.to_string())
    }
}
