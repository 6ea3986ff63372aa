use thiserror::Error;

/// Errors raised by estimators, tests and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RpdcError {
    #[error("sample size {got} is too small (need at least {min})")]
    SampleSize { got: usize, min: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("singular covariance block '{block}' (condition number {condition:.3e})")]
    SingularBlock { block: &'static str, condition: f64 },

    #[error("column {column} has fewer than two distinct values")]
    RankDegenerate { column: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl RpdcError {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            RpdcError::Degenerate(_) => 1,
            RpdcError::Numeric(_) | RpdcError::SingularBlock { .. } => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for RpdcError {
    fn from(e: std::io::Error) -> Self {
        RpdcError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, RpdcError>;
