use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments that are well formed but outside the operation's domain
    /// (unknown subset mask, context mismatch, dimension mismatch).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value failed its invariants (non-PSD state, inconsistent decoupling...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Size caps (arity, dimension) exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
