use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point index {index} out of bounds for {num_points} points")]
    PointOutOfBounds { index: usize, num_points: usize },

    #[error("range index {index} out of bounds for {num_ranges} ranges")]
    RangeOutOfBounds { index: usize, num_ranges: usize },

    #[error("range {range} is not strictly increasing")]
    UnsortedRange { range: usize },

    #[error("range {range} is empty")]
    EmptyRange { range: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("weight vector has {got} entries, expected {expected}")]
    WeightLength { expected: usize, got: usize },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("malformed instance: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("LP is infeasible: {0}")]
    Infeasible(String),

    #[error("LP solver failed: {0}")]
    Numerical(String),

    #[error("unhit range {range} has zero LP weight")]
    ZeroWeightRange { range: usize },

    #[error("oracle call cap of {cap} exceeded")]
    OracleCapExceeded { cap: u64 },

    #[error("no hitting set of size <= {cap}; optimum is unknown and >= {}", cap + 1)]
    SizeCapExceeded { cap: usize },

    #[error("shape generation for range {range} exceeded {retries} retries")]
    RetryCapExceeded { range: usize, retries: usize },

    #[error("packing is invalid: {0}")]
    InvalidPacking(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
