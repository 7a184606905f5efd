use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A precondition of an operation was not met by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A function evaluation produced a non-finite value or hit a domain error.
    #[error("evaluation failed at {point:?}: {reason}")]
    Evaluation { point: Vec<f64>, reason: String },

    /// Expression text could not be parsed.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("variable x{index} out of range for dimension {dimension} (offset {offset})")]
    VariableOutOfRange {
        index: usize,
        dimension: usize,
        offset: usize,
    },

    #[error("dimension {0} is not supported by this operation")]
    UnsupportedDimension(usize),

    /// An iterative solver gave up; `best` is its last iterate.
    #[error("numeric failure: {message} (best iterate {best:?})")]
    NumericFailure { message: String, best: Vec<f64> },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn eval(point: &[f64], reason: impl Into<String>) -> Self {
        Error::Evaluation {
            point: point.to_vec(),
            reason: reason.into(),
        }
    }
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
