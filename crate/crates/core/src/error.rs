use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid symbol `{0}`")]
    InvalidSymbol(String),
    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),
    #[error("alphabet must be non-empty")]
    EmptyAlphabet,
    #[error("symbol `{0}` is not in the machine's alphabet")]
    UnknownSymbol(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not stochastic: {0}")]
    NotStochastic(String),
    #[error("malformed machine: {0}")]
    MalformedMachine(String),
    #[error("advice violates its length policy at n = {n}: got length {len}")]
    AdvicePolicy { n: usize, len: usize },
    #[error("no advice defined for length {0}")]
    AdviceUndefined(usize),
    #[error("ensemble support for length {n} has length {found}, expected {expected}")]
    SupportLength { n: usize, expected: usize, found: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("degenerate context: {0}")]
    DegenerateContext(String),
    #[error("machine is not uniform-1/d: {0}")]
    NotUniformD(String),
    #[error("language contains the empty string")]
    EmptyStringInLanguage,
    #[error("off-half adjustment failed: {0}")]
    AdjustmentFailure(String),
    #[error("enumeration budget exceeded: {0}")]
    ScaleLimit(String),
    #[error("verification gap: {0}")]
    VerificationGap(String),
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("invalid rational `{0}`")]
    InvalidRational(String),
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("document error: {0}")]
    Document(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
