//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not weakly connected: {0}")]
    NotWeaklyConnected(String),

    #[error("agent index {0} out of range 1..={1}")]
    AgentOutOfRange(usize, usize),

    #[error("inter-cluster common influence (EEP) violated: {0}")]
    EepViolation(String),

    #[error("topology infeasible for group consensus: {0}")]
    Infeasible(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("(A, B) is not stabilizable: uncontrollable mode at {0}")]
    NotStabilizable(String),

    #[error("eigenvalue iteration failed to converge for a {0}x{0} matrix")]
    EigNonConvergence(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("random graph generator exhausted its resampling budget ({0} attempts)")]
    GeneratorBudget(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
