use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },

    #[error("invalid numeric literal {0:?}")]
    Literal(String),

    #[error("arithmetic error: {0}")]
    Arithmetic(&'static str),

    #[error("vertex {vertex} has positive demand but is unreachable from the root")]
    Unreachable { vertex: usize },

    #[error("invalid price function: {0}")]
    Price(String),

    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),

    #[error("the fast oracle needs at least 2 priceable edges, instance has {0}")]
    TooFewPriceable(usize),

    #[error("empty edge sequence has no fixed-cost length")]
    EmptySequence,

    #[error("reduced tree is not realizable: {0}")]
    Unrealizable(String),

    #[error("dimension mismatch: structure has {expected}, query has {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("candidate space is empty")]
    EmptyCandidateSpace,
}

impl Error {
    pub(crate) fn validation(field: &'static str, message: impl Into<String>) -> Self {
        Error::Validation {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
