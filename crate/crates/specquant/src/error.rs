use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A spectral model violated a construction invariant.
    #[error("invalid spectral model: {0}")]
    InvalidModel(String),

    /// Covariance factorization failed even after jitter escalation.
    #[error("covariance factorization failed for {model} (n = {n}) after jitter up to {max_jitter:e}")]
    FactorizationFailed {
        model: String,
        n: usize,
        max_jitter: f64,
    },

    /// Rejection sampling of separated frequencies gave up.
    #[error("could not draw {k} frequencies with separation {min_sep} in {attempts} attempts")]
    SeparationSampling {
        k: usize,
        min_sep: f64,
        attempts: usize,
    },

    /// A grid basis-pursuit fit had no feasible decomposition.
    #[error("grid atomic-norm fit infeasible: {0}")]
    InfeasibleFit(String),

    /// Malformed input data (CSV, JSON, config).
    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
