use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid value: {0}")]
    Validation(String),

    #[error("duplicate id {id:?} in {source_name}")]
    DuplicateId { id: String, source_name: String },

    #[error("cannot balance: {0}")]
    CannotBalance(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("least-squares solver failed: {0}")]
    Solver(String),

    #[error("unsupported model format version {found} (expected {expected})")]
    ModelVersion { found: u64, expected: u64 },

    #[error("malformed model file {path}: {message}")]
    MalformedModel { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for failures of the numeric or model layer, as opposed to bad
    /// input files or arguments.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Dimension { .. }
                | Error::NonFinite(_)
                | Error::Solver(_)
                | Error::ModelVersion { .. }
                | Error::MalformedModel { .. }
        )
    }
}
