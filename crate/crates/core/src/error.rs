//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),
    /// An argument lies outside the range a model supports.
    #[error("range error: {0}")]
    Range(String),
    /// Caller misuse, e.g. an unsorted grid.
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),
    #[error("invalid permutation code: {0}")]
    InvalidCode(String),
    #[error("infeasible search budget: {0}")]
    Budget(String),
    #[error("rate mismatch: {0}")]
    RateMismatch(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
