use thiserror::Error;

/// Errors raised by the truncated module and complex constructions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree {degree} out of range for dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },

    #[error("ambient dimension must be even and positive, got {0}")]
    OddDimension(usize),

    #[error("metric is not symmetric positive definite: {0}")]
    InvalidMetric(String),

    #[error("matrix is not hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("not a symplectic Lie algebra element (defect {defect:.3e})")]
    NotSymplectic { defect: f64 },

    #[error("connection is not flat: {0}")]
    InvalidConnection(String),

    #[error("hermite cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("matrix file: {0}")]
    MatrixFormat(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::MatrixFormat(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
