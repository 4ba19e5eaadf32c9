use thiserror::Error;

use crate::arith::Factorization;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("cannot parse {input:?} as a rational (expected \"p/q\" or an integer)")]
    Parse { input: String },

    #[error("gamma = {gamma} is an integer <= 0, so n + gamma vanishes for some n >= 0")]
    InvalidGamma { gamma: String },

    #[error("alpha is zero; the reciprocal recurrence has no (alpha, beta, gamma) form")]
    ZeroAlpha,

    #[error("the sequence has a vanishing term at index {index}")]
    ZeroTerm { index: String },

    #[error(
        "need terms a_{first}..=a_{last}, window covers a_{have_first}..a_{have_end} (exclusive)"
    )]
    InsufficientTerms {
        first: usize,
        last: usize,
        have_first: usize,
        have_end: usize,
    },

    #[error("denominator factor {factor} vanishes at {location}")]
    SingularDenominator { factor: String, location: String },

    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("factorization work budget exhausted; partial result has unfactored composites")]
    FactorTimeout { partial: Box<Factorization> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
