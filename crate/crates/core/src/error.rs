use thiserror::Error;

/// Errors produced by the forecasting library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix-vector shape mismatch: matrix is {rows}x{cols}, vector has length {vec_len}")]
    MatVecShape {
        rows: usize,
        cols: usize,
        vec_len: usize,
    },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{what} must not be empty")]
    Empty { what: &'static str },

    #[error("invalid uniform range: lo {lo} > hi {hi}")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("percentile fraction {q} outside [0, 1]")]
    InvalidQuantile { q: f64 },

    #[error("{what} must be at least 1")]
    ZeroDimension { what: &'static str },

    #[error("window has length {got}, expected {expected}")]
    WindowLength { expected: usize, got: usize },

    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("series too short: {len} values, need more than {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("resample step {new_step} is not a positive multiple of {step}")]
    BadResampleStep { step: i64, new_step: i64 },

    #[error("timestamps are not aligned to a uniform grid: {msg}")]
    IrregularGrid { msg: String },

    #[error("category {0:?} not present in table")]
    UnknownCategory(String),

    #[error("unknown synthetic profile {0:?}")]
    UnknownProfile(String),

    #[error("all {n} points have |actual| <= {eps}; MAPE is undefined")]
    AllExcluded { n: usize, eps: f64 },

    #[error("seasonal period {period} exceeds available history {available}")]
    InsufficientHistory { period: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
