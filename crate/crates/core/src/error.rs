use thiserror::Error;

use crate::problem::ValidationReport;

/// Errors raised by the numerical routines.
///
/// Hypothesis failures of the decay theorems are not errors unless an
/// operation needs the hypothesis as a precondition.
#[derive(Debug, Error)]
pub enum FifError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid problem: {0}")]
    Invalid(ValidationReport),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("accuracy guard violated: {0}")]
    Accuracy(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("malformed problem definition: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FifError>;
