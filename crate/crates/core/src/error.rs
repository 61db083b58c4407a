use thiserror::Error;

use crate::span::Diagnostic;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("sort error: {0}")]
    Sort(String),

    #[error("groundness error: {0}")]
    Groundness(String),

    #[error("validation failed with {} diagnostic(s)", .0.len())]
    Validation(Vec<Diagnostic>),

    #[error("theory error: {0}")]
    Theory(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("formula is not regressable: {0}")]
    NotRegressable(String),

    /// Both the positive and the negative effect condition of a fluent
    /// fired for the same instance. `trace` is the rendered situation
    /// including the offending action.
    #[error("inconsistent effect on {atom} by {action} after {trace}")]
    InconsistentEffect {
        atom: String,
        action: String,
        trace: String,
    },

    #[error("program error: {0}")]
    Program(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
