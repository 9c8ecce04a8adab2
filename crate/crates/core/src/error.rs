use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("infeasible start: {0}")]
    InfeasibleStart(String),

    #[error("neighborhood too large: more than {limit} neighbors")]
    NeighborhoodTooLarge { limit: usize },

    #[error("solution variant does not match problem {problem}: got {got}")]
    VariantMismatch { problem: String, got: String },

    #[error("infeasible solution: {0}")]
    Infeasible(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("partial assignment: expected {expected} values, got {got}")]
    PartialAssignment { expected: usize, got: usize },

    #[error("no affine offset: {0}")]
    NoAffineOffset(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
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

pub type Result<T, E = Error> = std::result::Result<T, E>;
