use thiserror::Error;

/// Errors raised by the term computations and their supporting algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("monomials overlap at position {position}; multilinear products must have disjoint supports")]
    OverlappingSupport { position: usize },
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("order must be between 1 and {max}, got {got}")]
    InvalidOrder { got: usize, max: usize },
    #[error("factor count must be between 2 and {max}, got {got}")]
    InvalidFactorCount { got: usize, max: usize },
    #[error("series must have constant coefficient 1, got {0}")]
    NonUnitConstant(String),
    #[error("expected {expected} series (one per factor), got {got}")]
    SeriesCountMismatch { expected: usize, got: usize },
    #[error("matrix diagonal entry {index} is not 1")]
    NonUnitDiagonal { index: usize },
    #[error("letter family {family} is outside an alphabet of {letters} letters")]
    FamilyOutOfRange { family: usize, letters: usize },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch between operands")]
    AlphabetMismatch,
    #[error("series is not homogeneous: word of length {found} in a degree-{expected} term")]
    NotHomogeneous { expected: usize, found: usize },
    #[error("exponential requires a series with zero constant term")]
    NonZeroConstant,
    #[error("logarithm requires a series with constant term 1")]
    LogConstant,
    #[error("sign table for order {n} needs {expected} values, has {got}")]
    IncompleteTable { n: usize, expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
