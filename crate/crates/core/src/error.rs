use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty candidate batch")]
    EmptyBatch,

    #[error("kernel matrix is ill-conditioned (factorization failed with jitter {jitter:e})")]
    IllConditioned { jitter: f64 },

    #[error("posterior variance {var:e} is too small for a UCB gradient")]
    SingularVariance { var: f64 },

    #[error("unstable estimate: {0}")]
    Unstable(String),

    #[error("backend does not provide `{0}`")]
    Unavailable(&'static str),

    #[error("backend failure: {0}")]
    Backend(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
