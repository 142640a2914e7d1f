use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("image set needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("operation requires at least 2 classes, got {0}")]
    SingleClass(usize),

    #[error("not enough samples: {context} (needed {needed}, available {available})")]
    NotEnoughSamples {
        context: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("training and validation class sets differ: {0}")]
    ClassMismatch(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("inconsistent feature dimension at line {line}: expected {expected}, got {got}")]
    InconsistentDimension {
        line: usize,
        expected: usize,
        got: usize,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
