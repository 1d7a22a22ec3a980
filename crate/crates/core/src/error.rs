use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("line {line}: expected {expected} columns, found {found}")]
    MalformedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: cannot parse {token:?} as a number")]
    BadNumber {
        line: usize,
        column: usize,
        token: String,
    },

    #[error("feature {feature} has no observed values for class {class}")]
    AllMissing { feature: String, class: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("SMO did not converge after {iterations} iterations (gap {gap:.3e})")]
    NotConverged {
        iterations: usize,
        gap: f64,
        best: Box<crate::learners::KernelModel>,
    },

    #[error("every generated feature was rejected by selection")]
    AllRejected(Box<crate::selection::SelectionReport>),

    #[error("{failed} of {total} folds failed: {details}")]
    FoldsFailed {
        failed: usize,
        total: usize,
        details: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
