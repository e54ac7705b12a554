use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Parameters that cannot be realised (too few cells, bad modulus, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An orbit search or enumeration ran past its configured budget.
    #[error("resource error: {0}")]
    Resource(String),

    #[error("invalid prefix table: {0}")]
    InvalidTable(String),

    #[error("map is not invertible: {0}")]
    NotInvertible(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("backend error: {0}")]
    Backend(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A precondition of an operation does not hold for the given input.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
