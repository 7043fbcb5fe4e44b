use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failure classes with stable exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Data(_) => 4,
            CliError::Compute(_) => 5,
        }
    }

    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Errors from the library during computation.
impl From<covar_core::Error> for CliError {
    fn from(e: covar_core::Error) -> Self {
        match e {
            covar_core::Error::Data(m) => CliError::Data(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Library errors raised while validating user parameters.
pub fn usage(e: covar_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}
