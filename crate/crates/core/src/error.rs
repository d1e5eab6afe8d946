use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `s^T y` is zero, so BB2-type quotients are undefined.
    #[error("degenerate step pair: s^T y = 0")]
    DegeneratePair,

    /// `s^T y <= 0`; the interpolated step has no positive root in `[bb1, bb2]`.
    #[error("non-positive curvature along step: s^T y = {0}")]
    Curvature(f64),

    #[error("unknown test function `{name}`; available: {}", available.join(", "))]
    UnknownFunction { name: String, available: Vec<String> },

    #[error("non-finite objective value near the evaluation point")]
    Evaluation,

    #[error("threshold equation has no two positive real roots (lambda = {lambda}, eta = {eta})")]
    NoRealRoots { lambda: f64, eta: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
