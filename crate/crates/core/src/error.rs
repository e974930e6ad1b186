use thiserror::Error;

use crate::syntax::{Name, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// A variable appeared where a ground object was required.
    #[error("{what} is not ground: variable ?{var} occurs")]
    NotGround { what: &'static str, var: Name },
    #[error("individual `{0}` is not mapped to any element")]
    UnknownIndividual(Name),
    #[error("`{0}` is not an element of the domain")]
    UnknownElement(Name),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("input is outside the supported fragment: {}", .0.join("; "))]
    Fragment(Vec<String>),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("invalid interpretation: {0}")]
    InvalidInterpretation(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
