use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// `ContradictionDetected` and `Stalled` are special: they fire only when a
/// verified mathematical guarantee fails at runtime, so reaching either one
/// means a falsifying instance was found (or the implementation is wrong).
/// The test suite asserts they stay unreachable on every sweep it runs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported prime {0}; supported primes are 2, 3, 5, 7")]
    UnsupportedPrime(u64),

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("the given vectors span the full space, no annihilator exists")]
    SpanIsFullSpace,

    /// Stored zero-based; the message is one-based like all user-facing indices.
    #[error("vector {} has a zero factor in mode {}", vector + 1, mode + 1)]
    ZeroFactor { vector: usize, mode: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("cannot drop the last remaining mode")]
    LastMode,

    #[error("tensor would have more than 2^20 entries")]
    TensorTooLarge,

    #[error("requested dimensions are infeasible: {0}")]
    BadDimensionRequest(String),

    #[error("operation requires exactly {expected} modes, got {got}")]
    WrongModeCount { expected: usize, got: usize },

    #[error("a proved statement failed on this input: {0}")]
    ContradictionDetected(String),

    #[error("subset enumeration supports at most 24 vectors, got {0}")]
    TooManyVectors(usize),

    #[error("the vectors do not sum to zero")]
    NonzeroTotalSum,

    #[error("not a partition of the index range: {0}")]
    NotAPartition(String),

    #[error("the block families admit a common proper sub-union")]
    ConditionsViolated,

    #[error("chain construction stalled before covering every index")]
    Stalled,

    #[error("budget exceeded: {0} candidates requested, budget is {1}")]
    BudgetExceeded(u128, u64),

    #[error("the rationals cannot be enumerated; use a prime field")]
    RationalsNotEnumerable,

    #[error("rank exceeds the requested bound; best lower bound is {lower_bound}")]
    RankExceedsBound { lower_bound: usize },

    #[error("stated rank {stated} does not match the oracle rank {actual}")]
    WrongRank { stated: usize, actual: usize },

    #[error("the two tensors are linearly dependent")]
    NotIndependent,

    #[error("over the rationals only spans of two product tensors are supported")]
    RationalsRequireProductSpan,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("the two sets have different total sums")]
    SumsDiffer,

    #[error("signatures do not match")]
    SignatureMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
