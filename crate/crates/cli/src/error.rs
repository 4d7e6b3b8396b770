use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("invalid state file {path}: {reason}")]
    BadInput { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("verdict is not monotone on [{lo}, {hi}]: {flips} flips in the pre-scan")]
    NonMonotone { lo: f64, hi: f64, flips: usize },
    #[error("verdict never changes on [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },
    #[error("self-test failed: {0}")]
    SelftestFailed(String),
    #[error(transparent)]
    Core(#[from] skewsep_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::SelftestFailed(_) => 1,
            CliError::BadInput { .. } => 2,
            CliError::Config(_) | CliError::NonMonotone { .. } | CliError::NoCrossing { .. } | CliError::Core(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
