use std::path::PathBuf;

use spca_core::SpcaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numeric error: {0}")]
    Numeric(#[from] SpcaError),
    #[error("{0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error: 2 for configuration problems,
    /// 3 for everything that went wrong at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
