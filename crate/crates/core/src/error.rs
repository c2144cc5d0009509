use thiserror::Error;

/// Errors raised by the library. Inequality failures in the coarea chain
/// carry the full report so the witnesses can be re-checked.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("instance too large for exact solver: {what} = {actual} exceeds limit {limit}; use the greedy method")]
    Size {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("axiom `{axiom}` violated; witness {witness}")]
    AxiomViolation { axiom: String, witness: String },

    #[error("cycle detected through {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("inequality check failed: {0}")]
    PropertyFailure(String, Box<serde_json::Value>),

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
