use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller passed arguments that do not fit together (wrong universe,
    /// good already in the set, overlapping bundles, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A requested exhaustive computation exceeds the configured budget.
    #[error("capacity exceeded: {what} needs {needed} states, limit is {limit}")]
    Capacity { what: String, needed: u128, limit: u128 },

    /// An algorithm's input precondition does not hold. The message names a witness.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed instance or allocation document.
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("invalid rational {0:?}: expected an integer or \"p/q\" string")]
    Rational(String),

    /// Something the algorithms guarantee did not happen. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
