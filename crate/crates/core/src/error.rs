use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("letter {letter} is outside the alphabet (d = {d}, r = {r})")]
    LetterOutOfAlphabet { letter: String, d: u32, r: u32 },

    #[error("renaming is not injective: {0} and {1} map to {2}")]
    NonInjective(String, String, String),

    #[error("malformed chain: {0}")]
    MalformedChain(String),

    #[error("unbound letter {0}")]
    UnboundLetter(String),

    #[error("matrix bound to {0} is not Hermitian (defect {1:.3e})")]
    NonHermitian(String, f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} = {got} exceeds the guard {limit}")]
    Guard { what: String, got: usize, limit: usize },

    #[error("quadrature did not converge: node doubling changed the value by {0:.3e}")]
    Quadrature(f64),

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Input rejected for a reason not covered by the other variants.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn guard(what: &str, got: usize, limit: usize) -> Self {
        Error::Guard { what: what.to_string(), got, limit }
    }

    /// True for errors raised by size guards rather than bad input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. })
    }
}
