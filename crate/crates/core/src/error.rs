use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left:?} vs {right:?}")]
    GridMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("field mean {mean:e} exceeds zero-mean tolerance {tol:e}")]
    NonZeroMean { mean: f64, tol: f64 },

    #[error("non-finite value at grid point {point}")]
    NonFinite { point: usize },

    #[error("datum out of range: sup|f| = {sup} exceeds {limit}")]
    OverflowGuard { sup: f64, limit: f64 },

    #[error("invalid equation spec: {0}")]
    InvalidSpec(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("non-positive value {value:e} at grid point {point} ({what})")]
    NonPositive {
        what: &'static str,
        point: usize,
        value: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certificate refused: {0}")]
    CertificateRefused(String),

    #[error("equation hypotheses not satisfied: {0}")]
    HypothesesNotSatisfied(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
