use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ensemble must contain at least one point")]
    EmptyEnsemble,

    #[error("weight {0} is negative")]
    NegativeWeight(f64),

    #[error("weights sum to {0}, expected 1 within 1e-12")]
    WeightSum(f64),

    #[error("non-finite coordinate or weight in ensemble")]
    NonFiniteEnsemble,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("time grids differ")]
    GridMismatch,

    #[error("noise has {noise} modes but the field expects {field}")]
    ModeMismatch { field: usize, noise: usize },

    #[error("non-finite state at step {step}, particle {particle}")]
    NonFiniteState { step: usize, particle: usize },

    #[error("non-finite adjoint at step {0}")]
    NonFiniteAdjoint(usize),

    #[error("transport solver did not converge after {iterations} iterations (marginal residual {residual:.3e})")]
    TransportNotConverged { iterations: usize, residual: f64 },

    #[error("trajectory provenance mismatch: {0}")]
    ProvenanceMismatch(String),

    #[error("control energy {energy} exceeds half the budget N = {budget}")]
    BudgetExceeded { energy: f64, budget: f64 },

    #[error("unknown built-in field `{0}`")]
    UnknownField(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
