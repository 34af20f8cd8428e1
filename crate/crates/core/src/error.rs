use thiserror::Error;

/// Errors raised by the library. Every variant names the violated precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("modulus is not irreducible over F_{p}: {modulus:?}")]
    Reducible { p: u64, modulus: Vec<u64> },

    #[error("operands live in different rings: {0}")]
    Mismatch(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("the ring has characteristic {0}; operation requires {1}")]
    WrongCharacteristic(u64, &'static str),

    #[error("degenerate form: {0}")]
    Degenerate(String),

    #[error("field too small: the normalisation needs an extension of degree {required} (have degree {have})")]
    ExtendField { required: u32, have: u32 },

    #[error("search budget exhausted: {0}")]
    BudgetExceeded(String),

    #[error("construction failed self-validation: {0}")]
    SelfValidation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
