use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("modulus mismatch in slot {slot}: {left} vs {right}")]
    Modulus { slot: usize, left: u32, right: u32 },

    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("search space too large: {0}")]
    Budget(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid coded vector space: {0}")]
    InvalidCvs(String),

    #[error("invalid coded module: {0}")]
    InvalidModule(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
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

pub type Result<T> = std::result::Result<T, Error>;
