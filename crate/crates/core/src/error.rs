use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state space mismatch: expected {expected} states, got {actual}")]
    SpaceMismatch { expected: usize, actual: usize },

    #[error("partitions are over different ground sets")]
    GroundMismatch,

    #[error("event is empty")]
    EmptyEvent,

    #[error("state index {index} out of range for {n} states")]
    StateOutOfRange { index: usize, n: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("enumeration of {n} states exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("mixture weight {0} is outside [0, 1]")]
    WeightOutOfRange(String),

    #[error("event has zero probability")]
    ZeroProbabilityEvent,

    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("invalid utility index: {0}")]
    InvalidUtility(String),

    #[error("invalid cost function: {0}")]
    InvalidCost(String),

    #[error("models do not share utility index and belief")]
    SharedPreconditionViolated,

    #[error("act has infinite complexity cost")]
    InfiniteCost,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("zero wealth for consumer {0}")]
    ZeroWealth(usize),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
