use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("computation failed: {0}")]
    Domain(#[from] heatkernel::Error),
    #[error("{failed} of {total} checks exceeded the tolerance")]
    OracleMismatch { failed: usize, total: usize },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema { path: path.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io { .. } => 1,
            CliError::Schema { .. } => 2,
            CliError::Domain(_) => 3,
            CliError::OracleMismatch { .. } => 4,
        })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
