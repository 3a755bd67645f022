use thiserror::Error;

/// Errors raised by the frame laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("support exceeds matrix domain: index {index} > dim {dim}")]
    SupportExceedsDomain { index: usize, dim: usize },

    #[error("sequence indices start at 1, got index 0")]
    ZeroIndex,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("frame must contain at least one element")]
    EmptyFrame,

    #[error("element {element} has support index {index} outside ambient dimension {dim}")]
    OutsideAmbient {
        element: usize,
        index: usize,
        dim: usize,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("frame does not span ambient space (rank {rank} < {dim})")]
    NotSpanning { rank: usize, dim: usize },

    #[error("dual is not a dual frame (reconstruction defect {defect:.3e})")]
    UnverifiedDual { defect: f64 },

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("alpha must exceed 1, got {0}")]
    AlphaTooSmall(f64),

    #[error("eigenvalues not distinct (indices {0} and {1})")]
    EigenvaluesNotDistinct(usize, usize),

    #[error("eigenvalue {index} has modulus {modulus} >= 1")]
    OutsideUnitDisc { index: usize, modulus: f64 },

    #[error("weights not bounded below (weight {index} = {value})")]
    WeightsNotBoundedBelow { index: usize, value: f64 },

    #[error("need at least {needed} elements, got {got}")]
    TooFew { needed: usize, got: usize },

    #[error("orbit diverges: norm {norm:.3e} at step {step}")]
    OrbitDiverges { step: usize, norm: f64 },

    #[error("sequence not linearly independent (rank {rank} < {len})")]
    NotLinearlyIndependent { rank: usize, len: usize },

    #[error("Rolewicz requires a > 1, got {0}")]
    RolewiczScale(f64),

    #[error("plan exceeds floating range; reduce targets or epsilon (target {target}, alpha {alpha})")]
    PlanUnderflow { target: usize, alpha: u64 },

    #[error("scale lambda must exceed 1, got {0}")]
    LambdaTooSmall(f64),

    #[error("tolerance must be below lower frame bound (epsilon {epsilon}, A {lower})")]
    EpsilonNotBelowLowerBound { epsilon: f64, lower: f64 },

    #[error("support hypothesis violated at k = {k}: m(k) = {support} > {limit}")]
    SupportHypothesisViolated { k: usize, support: usize, limit: usize },

    #[error("schedule covers {have} terms, need {need}")]
    ScheduleTooShort { have: usize, need: usize },

    #[error("dyadic schedule requires {0}")]
    DyadicPrecondition(String),

    #[error("invalid builtin: {0}")]
    Builtin(String),

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
