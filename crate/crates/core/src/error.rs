use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("permutation size must be at least 1")]
    EmptyPermutation,

    #[error("not a permutation of 1..={n}: {entries:?}")]
    NotABijection { n: usize, entries: Vec<usize> },

    #[error("size mismatch: expected {expected}, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("adjacent transposition ({a} {next}) is out of range for n = {n}", next = .a + 1)]
    TranspositionOutOfRange { a: usize, n: usize },

    #[error("weight {value} at index {index} is negative or not finite")]
    InvalidWeight { index: usize, value: f64 },

    #[error("weights increase between positions {} and {}; the closed form needs nonincreasing weights, use the exact oracle", index + 1, index + 2)]
    NonMonotoneWeights { index: usize },

    #[error("oracle cap exceeded: n = {n} is larger than the cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("target is unreachable with the given generator set")]
    Unreachable,

    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),

    #[error("profile must contain at least one ranking")]
    EmptyProfile,

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("edge {{{0}, {1}}} is not in the network")]
    EdgeNotInNetwork(usize, usize),

    #[error("degenerate gaps: objects {objects:?} have tied average scores")]
    DegenerateGaps { objects: Vec<usize> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no consensus reached within {t_max} steps")]
    Timeout { t_max: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
