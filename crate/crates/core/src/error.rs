use thiserror::Error;

/// Errors raised by the arithmetic and census routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact integer computation left the supported range.
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    /// A configured work limit would be exceeded.
    #[error("resource limit `{limit}` exceeded: needed {needed}, limit is {allowed}")]
    Resource {
        limit: &'static str,
        needed: u128,
        allowed: u128,
    },

    /// An enumeration could not certify that it is complete.
    #[error("incomplete enumeration: {0}")]
    Incomplete(String),

    /// An internal invariant failed; indicates a bug or an invalid object.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
