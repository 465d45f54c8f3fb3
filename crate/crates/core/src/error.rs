use thiserror::Error;

/// Errors shared by the measure algebra, transform, and construction layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} needs {needed} {unit}, budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u128,
        unit: &'static str,
    },

    #[error("sum positions not certified distinct and enumeration was not requested")]
    DistinctnessUncertified,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("derivative of order {order} unavailable for {function}")]
    MissingDerivative { function: String, order: usize },

    #[error("missing seminorm table entry for {0}")]
    MissingSeminorm(String),

    #[error("profile shows no superpolynomial growth at this truncation: {0}")]
    InsufficientGrowth(String),

    #[error("search cap reached: {what} (best achieved {achieved}, target {target})")]
    SearchCapReached {
        what: String,
        achieved: f64,
        target: f64,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
