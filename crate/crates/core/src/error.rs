use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient index {index} beyond stored table of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series did not converge within {terms} terms (last term {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("positivity assumption violated at index {index}: {detail}")]
    PositivityViolated { index: usize, detail: String },

    #[error("requested tolerance {atol:e} not certifiable within {max_terms} terms; partial value {partial}, best bound {bound:e}")]
    Uncertified { atol: f64, max_terms: usize, partial: f64, bound: f64 },

    #[error("operation requires an infinite coefficient family; explicit tables are finite")]
    FiniteSource,
}

pub type Result<T> = std::result::Result<T, Error>;
