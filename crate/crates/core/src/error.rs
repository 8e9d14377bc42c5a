use thiserror::Error;

/// Errors produced by the solver, the problem registry and the metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid problem definition: {0}")]
    ProblemDefinition(String),

    #[error("invalid solver parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Gradient of a global descent function requested at its anchor.
    #[error("gradient requested within {distance:e} of the anchor")]
    AnchorSingularity { distance: f64 },

    #[error("line search stalled after {contractions} contractions")]
    LineSearchStalled { contractions: usize },

    /// No admissible candidate could be placed outside the deleted neighborhood.
    #[error("could not place any candidate outside the deleted {eps}-neighborhood")]
    CandidateExhausted { eps: f64 },

    /// The (mu, rho) reduction loop hit its cap or the rho floor.
    #[error("candidate rejected after {reductions} parameter reductions")]
    CandidateRejected { reductions: usize },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("undefined: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
