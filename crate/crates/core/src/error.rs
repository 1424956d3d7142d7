use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("values left the floating-point range at t = {t}")]
    Overflow { t: f64 },

    #[error("eigenvalue iteration failed to converge after {iterations} iterations")]
    Convergence { iterations: usize },

    #[error("initial condition is the equilibrium point r0 = 0; the trajectory is not a curve")]
    DegenerateInitialCondition,

    #[error("trajectory is at equilibrium (first derivative vanishes) at t = {t}")]
    Equilibrium { t: f64 },

    #[error("unsupported size for the minor-sum reference: k = {k}, n = {n} (need k <= 3, n <= 8)")]
    UnsupportedSize { k: usize, n: usize },

    #[error("eigenvalues {first} and {second} are too close to resolve block structure")]
    IllConditionedSpectrum { first: String, second: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not enough valid trace points: {valid} (need at least {required})")]
    InsufficientTrace { valid: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
