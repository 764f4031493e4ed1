use thiserror::Error;

use crate::model::Violation;

/// Errors raised by the library. Indices carried in messages are 1-based,
/// matching the JSON file formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid forest: {}", summarize(.0))]
    InvalidForest(Vec<Violation>),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range 1..={size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("indices must be distinct (got {0} twice)")]
    SameIndex(usize),

    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("arithmetic overflow")]
    Overflow,

    #[error("component {0} is not final")]
    NotFinal(usize),

    #[error("not contractible: no final component among {remaining} remaining")]
    NotContractible { remaining: usize },

    #[error("contraction order limit {0} exceeded")]
    LimitExceeded(usize),

    #[error("search node limit {0} exceeded")]
    SearchLimit(usize),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Stable kebab-case identifier, used as the error code in JSON output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidForest(_) => "invalid-forest",
            Error::InvalidPartition(_) => "invalid-partition",
            Error::SizeMismatch { .. } => "size-mismatch",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::SameIndex(_) => "same-index",
            Error::InvalidTensor(_) => "invalid-tensor",
            Error::InvalidPermutation(_) => "invalid-permutation",
            Error::InvalidBounds(_) => "invalid-bounds",
            Error::Overflow => "overflow",
            Error::NotFinal(_) => "not-final",
            Error::NotContractible { .. } => "not-contractible",
            Error::LimitExceeded(_) => "limit-exceeded",
            Error::SearchLimit(_) => "search-limit",
            Error::Parse(_) => "parse",
        }
    }
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("[{}] {}", v.rule, v.message))
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
