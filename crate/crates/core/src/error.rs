use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the career path engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: malformed JSON: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: record {person_id:?} violates schema: {message}")]
    Schema {
        line: usize,
        person_id: Option<String>,
        message: String,
    },

    #[error("invalid date {0:?}, expected YYYY-MM")]
    InvalidDate(String),

    #[error("invalid company size category {0:?}")]
    InvalidCompanySize(String),

    #[error("invalid job key: {0}")]
    InvalidJob(String),

    #[error("invalid generator config: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("person {0:?} has no graduation date")]
    MissingGraduation(String),

    #[error("unknown job id {0}")]
    UnknownJob(usize),

    #[error("no edge from job {from} to job {to}")]
    MissingEdge { from: usize, to: usize },

    #[error("edge criteria not computed: {0}")]
    CriteriaMissing(&'static str),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("payoff for edge {edge} is not finite ({value})")]
    NonFinitePayoff { edge: usize, value: f64 },

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error(
        "origin mismatch for path {index}: optimized starts at {optimized}, actual at {actual}"
    )]
    OriginMismatch {
        index: usize,
        optimized: usize,
        actual: usize,
    },

    #[error("unknown method {0:?}")]
    UnknownMethod(String),

    #[error("csv error on {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
