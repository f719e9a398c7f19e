use thiserror::Error;

/// Errors produced by dyadic arithmetic, tower construction and the
/// construction pipeline.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank {rank} exceeds the rank cap {cap}")]
    RankCapExceeded { rank: u32, cap: u32 },

    #[error("invalid dyadic value: {0}")]
    InvalidDyadic(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("point has no dyadic preimage under this iterate (inverse orbit of 0)")]
    NotRepresentable,

    #[error("target measure {target} is too small for precision 2^-{precision} at height {height}")]
    MeasureTooSmall {
        target: String,
        precision: u32,
        height: u64,
    },

    #[error("precision {given} is shallower than required {needed} for height {height}")]
    PrecisionTooShallow { given: u32, needed: u32, height: u64 },

    #[error("tower base width needs {bits} fragment bits; limit is {max}")]
    TowerTooFine { bits: u32, max: u32 },

    #[error("lattice evaluation budget exceeded: N^n = {cost} > {budget}")]
    EvalBudgetExceeded { cost: u128, budget: u128 },

    #[error("materialized set would have {size} components; limit is {max}")]
    SetTooLarge { size: u128, max: u128 },

    #[error("exact deviation sets require N <= {threshold}, got {n}")]
    ExactThresholdExceeded { n: u64, threshold: u64 },

    #[error("exact deviation sweep needs rank {rank}; limit is {max}")]
    SweepRankExceeded { rank: u32, max: u32 },

    #[error("scale search exhausted: no admissible N <= {cap} (eps/delta too aggressive)")]
    ScaleSearchExhausted { cap: u64 },

    #[error("stage {stage} certification failed after {retries} height doublings")]
    CertificationFailed { stage: usize, retries: u32 },

    #[error("measure budget exhausted at stage {stage}")]
    BudgetExhausted { stage: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("config error: {0}")]
    InvalidConfig(String),

    #[error("malformed function spec: {0}")]
    MalformedSpec(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
