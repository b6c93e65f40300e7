use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation undefined at the zero element")]
    ZeroElement,

    #[error("operation requires a nonzero rational function")]
    ZeroFunction,

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("operation requires a nonconstant function, got a constant")]
    ConstantFunction,

    #[error("prime {0} equals the field characteristic")]
    CharacteristicPrime(u64),

    #[error("polynomial is reducible")]
    Reducible,

    #[error("point does not lie on the variety")]
    NotOnVariety,

    #[error("g is a full {0}-th power with {0} | q-1, so it is a primitive root nowhere")]
    FullPower(u64),

    #[error("hypothesis not satisfied: {0}")]
    Inapplicable(String),

    #[error("enumeration of {needed} items exceeds the cap of {cap}")]
    CapExceeded { needed: u128, cap: u64 },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// An identity that always holds was violated; this indicates a bug.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
