use thiserror::Error;

use crate::factor::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{kind} index {} out of range 1..={bound}", index + 1)]
    IndexOutOfRange { kind: &'static str, index: usize, bound: usize },

    #[error("cover cell ({}, {}) is not a 1-entry of the matrix", row + 1, col + 1)]
    CoverNotSubset { row: usize, col: usize },

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("invalid factorization: {} violation(s), first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidFactorization(Vec<Violation>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A proven inequality failed at runtime. Always a bug.
    #[error("internal assertion failed: {0}")]
    Invariant(String),

    #[error("no instances found in {0}")]
    NoInstances(String),

    /// An error while reading the named file.
    #[error("{path}: {source}")]
    File { path: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn in_file(self, path: &std::path::Path) -> Self {
        Error::File { path: path.display().to_string(), source: Box::new(self) }
    }

    /// True for failed internal assertions, including ones wrapped in file context.
    pub fn is_invariant(&self) -> bool {
        match self {
            Error::Invariant(_) => true,
            Error::File { source, .. } => source.is_invariant(),
            _ => false,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
