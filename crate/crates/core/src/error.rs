use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{what} = {value} is out of range [{min}, {max}]")]
    Bounds {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },

    #[error("modulus {modulus:#x} has degree {got}, expected {expected}")]
    DegreeMismatch {
        modulus: u64,
        expected: u32,
        got: u32,
    },

    #[error("modulus {modulus:#x} is reducible: divisible by {factor:#x}")]
    ReducibleModulus { modulus: u64, factor: u64 },

    #[error("element {bits:#x} does not belong to GF(2^{r})")]
    InvalidElement { bits: u64, r: u32 },

    #[error("division by zero in GF(2^{r})")]
    DivisionByZero { r: u32 },

    #[error("additive character with c = 0 is trivial")]
    TrivialCharacter,

    #[error("{0}")]
    Domain(String),

    #[error("{what}: {size} exceeds the limit {limit}")]
    Size {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("{check} violated: lhs = {lhs}, rhs = {rhs}")]
    IdentityViolation {
        check: String,
        lhs: String,
        rhs: String,
    },

    #[error(
        "dual code map is not injective: a = {first:#x} and a = {second:#x} give the same codeword"
    )]
    Injectivity { first: u32, second: u32 },

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn violation(check: impl Into<String>, lhs: impl ToString, rhs: impl ToString) -> Error {
    Error::IdentityViolation {
        check: check.into(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}
