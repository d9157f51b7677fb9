use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("polynomial degree {0} is not supported (maximum 4)")]
    UnsupportedDegree(usize),

    #[error("problem has {num_vars} variables, exhaustive search is capped at {cap}")]
    Capacity { num_vars: usize, cap: usize },

    #[error("sample set is empty")]
    EmptySampleSet,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
