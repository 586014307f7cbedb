use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid block length {0}: must be a power of two and at least 2")]
    InvalidLength(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("enumeration budget exceeded: {required} candidates required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("list size {list_size} is below the minimum {required} for this look-ahead window")]
    ListTooSmall { list_size: usize, required: usize },

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

pub type Result<T> = std::result::Result<T, Error>;
