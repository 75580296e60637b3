use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The scalar optimizer could not evaluate the objective on enough of its grid.
    #[error("optimization failed: {reason} (last finite evaluation: {last_finite:?})")]
    Optimization {
        reason: String,
        /// `(argument, value)` of the last finite evaluation, if any.
        last_finite: Option<(f64, f64)>,
    },

    /// A distribution pair violates its construction invariants.
    #[error("invalid distribution pair: {0}")]
    InvalidPair(String),

    /// A textual pair specification could not be parsed.
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// The operation is not defined for the pair's family.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// An exhaustive computation would exceed its size limit.
    #[error("instance too large: {0}")]
    TooLarge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
