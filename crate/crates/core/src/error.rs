use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigitError {
    #[error("digit {0} out of range 0..=9")]
    DigitOutOfRange(u8),
    #[error("invalid digit character {0:?}")]
    InvalidChar(char),
    #[error("empty digit sequence")]
    Empty,
    #[error("all-zero input is not a positive integer")]
    AllZero,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("repeat count must be positive")]
    ZeroRepeat,
    #[error("digit sequence of length {0} is too long")]
    TooLong(u64),
    #[error("cannot parse {input:?} at byte {position}: expected digit or `_(count)`")]
    Syntax { input: String, position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("orbit size {orbit} exceeds the brute-force budget {budget}")]
    BudgetExceeded { orbit: String, budget: u64 },
    #[error("records have length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("k must be at least 1")]
    ZeroLength,
    #[error("k = {k} exceeds the stage-1 cap of {cap}")]
    LengthCap { k: usize, cap: usize },
    #[error("orbit budget must be at least 1")]
    ZeroBudget,
    #[error("lower catalog has no entry for length {0}")]
    MissingLowerCatalog(usize),
    #[error("census bound {max} exceeds the limit {limit}")]
    CensusBound { max: u64, limit: u64 },
    #[error("stage 2 requires a configuration with allow_zero = true")]
    ZerosDisallowed,
    #[error("stage 1 requires a configuration with allow_zero = false")]
    ZerosAllowed,
    #[error("PINN predicates disagree: {0}")]
    OracleDisagreement(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("family {family} needs k >= {min_k}, got {k}")]
    KTooSmall { family: String, k: usize, min_k: usize },
    #[error("catalog covers k = 1..=9, got {0}")]
    CatalogRange(usize),
    #[error("catalog data line {line}: {reason}")]
    CatalogData { line: usize, reason: String },
    #[error(transparent)]
    Digit(#[from] DigitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("modulus must be at least 2")]
    ModulusTooSmall,
    #[error("{0} is not coprime to 10")]
    NotCoprime(String),
    #[error("factorization of {0} did not finish within the time budget")]
    FactorizationTimeout(String),
    #[error("{0} is not prime")]
    NotPrime(String),
}
