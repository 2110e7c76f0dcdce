use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^62")]
    NotPrime(u64),
    #[error("modulus {0} must satisfy 2 <= N < 2^62")]
    BadModulus(u64),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("prime {0} appears more than once")]
    DuplicatePrime(u64),
    #[error("prime {prime} must exceed {bound}")]
    PrimeTooSmall { prime: u64, bound: u64 },
    #[error("indices of different weights: {0} and {1}")]
    WeightMismatch(u32, u32),
    #[error("search space of {0} candidates exceeds the brute-force limit")]
    TooLarge(u128),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
