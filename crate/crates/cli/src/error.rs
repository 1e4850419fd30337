use std::path::PathBuf;

use thiserror::Error;

/// Everything a command can fail with, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("unknown mode {0:?}; expected \"characteristic\" or \"mgf\"")]
    UnknownMode(String),
    #[error("invalid {what}: {message}")]
    InvalidArgument { what: &'static str, message: String },
    #[error("problem digests differ: {a} vs {b}")]
    DigestMismatch { a: String, b: String },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] levyarea::Error),
}

impl CliError {
    /// 2 for bad input, 3 for Riccati blow-up, 4 for numerical trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(levyarea::Error::BlowUp { .. }) => 3,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 4,
            CliError::Write { .. } | CliError::Csv(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
