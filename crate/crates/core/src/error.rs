use thiserror::Error;

use crate::distributions::Outcome;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("duplicate outcome label {0}")]
    DuplicateOutcome(Outcome),

    #[error("kernel has no row for supported outcome {0}")]
    MissingRow(Outcome),

    #[error("Rényi order must be > 1, got {0}")]
    InvalidOrder(f64),

    #[error("argument {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid trade-off curve: {0}")]
    InvalidCurve(String),

    #[error("supremum of an empty set of trade-off functions")]
    EmptySet,

    #[error("no conditional trade-off function for outcome {0}")]
    MissingConditional(Outcome),

    #[error("witness spends budget {spent} > {alpha}")]
    BudgetViolation { spent: f64, alpha: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("trade-off dominance violated: {0}")]
    DominanceViolated(String),

    #[error("kernel undefined at {0}")]
    UndefinedKernel(String),

    #[error("strategy undefined on answer history {0:?}")]
    UndefinedStrategy(Vec<String>),

    #[error("post-processor has no response for seed {seed} at prefix {prefix:?}")]
    UndefinedResponse { seed: Outcome, prefix: String },

    #[error("adversary enumeration needs {count} strategies, guard is {guard}")]
    ExplosionGuard { count: u128, guard: u64 },

    #[error("alphabet clash on label {0:?}")]
    AlphabetClash(String),

    #[error("invalid mechanism: {0}")]
    InvalidMechanism(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}
