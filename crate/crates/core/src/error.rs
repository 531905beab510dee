use thiserror::Error;

/// Errors produced by every operation in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 1")]
    ZeroModulus,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("base {base} and modulus {modulus} are not coprime (gcd = {gcd})")]
    NotCoprime { base: u128, modulus: u128, gcd: u128 },

    #[error("{0} is not prime")]
    NotPrime(u128),

    /// The factorization budget ran out before `n` was split completely.
    /// `unresolved` holds the composite cofactors that could not be split.
    #[error("incomplete factorization of {n}: unresolved cofactors {unresolved:?}")]
    IncompleteFactorization { n: u128, unresolved: Vec<u128> },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An input outside the range where a criterion is known to hold.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::IncompleteFactorization { .. } => 3,
            Error::Capacity(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
