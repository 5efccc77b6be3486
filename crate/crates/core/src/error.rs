use thiserror::Error;

/// Errors raised by the computations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operands are structurally incompatible (ring, variables or truncation mismatch).
    #[error("structural error: {0}")]
    Structural(String),

    /// An enumeration would exceed its configured budget.
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: String,
        needed: String,
        budget: u64,
    },

    /// A constructed object failed one of its defining identities.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn budget(what: impl Into<String>, needed: impl ToString, budget: u64) -> Self {
        Error::Budget {
            what: what.into(),
            needed: needed.to_string(),
            budget,
        }
    }
}
