use thiserror::Error;

use crate::solvers::Trace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("point outside the domain: {0}")]
    Domain(String),

    /// γ-backtracking could not make θ positive. Usually means the numerator
    /// infimum is not bounded away from zero; shifting it helps.
    #[error(
        "theta-positivity backtracking exhausted at iteration {iteration} after {attempts} trials \
         (try shifting the numerator by a positive constant)"
    )]
    ThetaBacktrackExhausted {
        iteration: usize,
        attempts: usize,
        trace: Box<Trace>,
    },

    #[error("inner solver diverged: {0}")]
    Divergence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::Dimension {
                context,
                expected,
                got,
            })
        }
    }

    /// Partial trace carried by a solver failure, if any.
    pub fn trace(&self) -> Option<&Trace> {
        match self {
            Error::ThetaBacktrackExhausted { trace, .. } => Some(trace),
            _ => None,
        }
    }
}
