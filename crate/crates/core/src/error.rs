use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root finder failed for J_{n}, root #{k}: {reason}")]
    RootNotFound { n: u32, k: u32, reason: String },

    #[error("no root j_{{{n},{k}}} in table (n_max = {n_max}, k_max = {k_max})")]
    MissingRoot { n: i32, k: u32, n_max: u32, k_max: u32 },

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("eigenvalue iteration did not converge within {budget} sweeps")]
    NoConvergence { budget: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
