use thiserror::Error;

use crate::rearrangement::RearrangementTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("term stream exhausted at index {index} (stream holds {len} terms)")]
    ExhaustedStream { index: usize, len: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid blocks: {0}")]
    InvalidBlocks(String),

    #[error("no evidence of conditional convergence: {0}")]
    NotConditionallyConvergentEvidence(String),

    #[error("budget of {budget} terms exceeded")]
    BudgetExceeded {
        budget: usize,
        trace: Box<RearrangementTrace>,
    },

    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),

    #[error("incompatible scalar mode: {0}")]
    IncompatibleMode(String),

    #[error("not a frame: {0}")]
    NotAFrame(String),

    #[error("invalid threshold rule: {0}")]
    InvalidRule(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI error object.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Shape(_) => "shape-error",
            Error::ExhaustedStream { .. } => "exhausted-stream",
            Error::InvalidPermutation(_) => "invalid-permutation",
            Error::InvalidBlocks(_) => "invalid-blocks",
            Error::NotConditionallyConvergentEvidence(_) => "not-conditionally-convergent-evidence",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::UnsupportedMethod(_) => "unsupported-method",
            Error::IncompatibleMode(_) => "incompatible-mode",
            Error::NotAFrame(_) => "not-a-frame",
            Error::InvalidRule(_) => "invalid-rule",
            Error::Parse { .. } => "parse-error",
            Error::Io(_) => "io-error",
            Error::Json(_) => "json-error",
            Error::Csv(_) => "csv-error",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
