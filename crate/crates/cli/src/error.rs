use std::io;
use std::path::PathBuf;

use nqs_ising_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Numerical(#[from] CoreError),
    #[error("{message}")]
    Exclusion { message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Format { .. } => 2,
            CliError::Numerical(CoreError::ExclusionThreshold { .. } | CoreError::TooFewChains { .. }) => 4,
            CliError::Numerical(CoreError::InvalidLattice(_) | CoreError::InvalidParameter(_)) => 2,
            CliError::Numerical(_) => 3,
            CliError::Exclusion { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Format { path: path.into(), message: message.into() }
    }
}

pub type CliResult<T> = Result<T, CliError>;
