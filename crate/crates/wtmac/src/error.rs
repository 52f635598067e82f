use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("resource limit: {what} needs {needed} cells, budget is {budget}")]
    Resource {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate typicality: {0}")]
    DegenerateTypicality(String),

    #[error("blocklength too small: {reason} (estimated required n >= {required_n})")]
    BlocklengthTooSmall { reason: String, required_n: usize },

    #[error("reduction infeasible: constraint '{constraint}' violated by {excess:.3e}")]
    ReductionInfeasible { constraint: String, excess: f64 },

    #[error("constraint violated: {0}")]
    Constraint(String),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn resource(what: impl Into<String>, needed: u128, budget: u128) -> Self {
        Error::Resource {
            what: what.into(),
            needed,
            budget,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
