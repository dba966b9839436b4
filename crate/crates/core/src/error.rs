use thiserror::Error;

/// Errors produced by the building computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("value is not p-integral (valuation {0})")]
    NegativeValuation(i64),
    #[error("matrix is singular")]
    Singular,
    #[error("expected {expected} entries, got {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("operands live over different (p, d) contexts")]
    ContextMismatch,
    #[error("expected a vector of length {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("index {index} outside 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("matrix is not diagonal")]
    NotDiagonal,
    #[error("empty vertex tuple")]
    EmptyTuple,
    #[error("search box too small: {0}")]
    BoxTooSmall(String),
    #[error("tuple not normalized: {0}")]
    NotNormalized(String),
    #[error("no perfect matching in the Hall relation")]
    NoPerfectMatching,
    #[error("operation requires d = 2")]
    RequiresRankTwo,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
