use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("{what} at index {index}: entry {value} is negative or not finite")]
    NegativeEntry {
        what: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{what} at index {index} sums to {sum}, expected 1")]
    NotNormalized {
        what: &'static str,
        index: usize,
        sum: f64,
    },
    #[error("shape mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` appears twice")]
    DuplicateVariable(String),
    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),
    #[error("empty variable set")]
    EmptySet,
    #[error("factor conditions on `{0}`, which no earlier factor produces")]
    DanglingVariable(String),
    #[error("joint tensor would have {0} cells, above the dense limit")]
    TooLarge(usize),
    #[error("conference capacity {0} must be finite and nonnegative")]
    InvalidCapacity(f64),
    #[error("channel is not physically degraded (residual {0:e})")]
    NotDegraded(f64),
    #[error("cardinality bound violated: {0}")]
    Cardinality(String),
    #[error("codebook needs {needed} codewords, cap is {cap}")]
    MemoryCap { needed: u128, cap: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
