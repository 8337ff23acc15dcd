//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Input data does not match the declared format (wrong format flag,
    /// corrupt cache, unparseable twin list, ...).
    #[error("format error: {0}")]
    Format(String),

    /// A value or configuration violates a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// The caller invoked an operation with arguments it does not accept,
    /// e.g. a comparative treatment where a predicate is required.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("no outcome recorded for paper {id}")]
    MissingOutcome { id: String },

    #[error("paper {id} not found in corpus")]
    MissingPaper { id: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
