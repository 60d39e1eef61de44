use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured size cap would be exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// Checked integer arithmetic overflowed.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    /// A computed identity or invariant did not hold.
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParam { key: String, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        LabError::Resource(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        LabError::Invariant(msg.into())
    }

    pub fn param(key: impl Into<String>, reason: impl Into<String>) -> Self {
        LabError::InvalidParam {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::UnknownExperiment(_) => 2,
            LabError::InvalidParam { .. } | LabError::Domain(_) => 3,
            LabError::Resource(_) | LabError::Overflow(_) => 4,
            LabError::Invariant(_) => 5,
            LabError::Io(_) | LabError::Csv(_) | LabError::Json(_) => 1,
        }
    }
}
