use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("tour has {actual} nodes but the instance has {expected}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("node {node} is out of range for an instance with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("duplicate node {0} in tour")]
    DuplicateNode(usize),

    #[error("node {0} missing from tour")]
    MissingNode(usize),

    #[error("brute force refused for n = {n} (limit {max})")]
    TooLarge { n: usize, max: usize },

    #[error("invalid generator config: {0}")]
    InvalidConfig(String),

    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),

    #[error("start node {start} out of range for {n} nodes")]
    InvalidStart { start: usize, n: usize },

    #[error("no candidate nodes available")]
    EmptyCandidates,

    #[error("{probabilities} probabilities for {nodes} candidate nodes")]
    ProbabilityMismatch { probabilities: usize, nodes: usize },

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("tour length must be positive, got {0}")]
    NonPositiveLength(f64),

    #[error("best length must be positive, got {0}")]
    NonPositiveBest(f64),

    #[error("belief {0} outside [0, 1]")]
    BeliefOutOfRange(f64),

    #[error("no positive weights after {attempts} sampling attempts")]
    DegenerateSample { attempts: usize },

    #[error("instance {index}: {source}")]
    Batch {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("empty sample")]
    EmptySample,

    #[error("samples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("need at least {needed} observations, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("non-finite value in sample")]
    NonFinite,

    #[error("all paired differences are zero")]
    AllZeroDifferences,
}
