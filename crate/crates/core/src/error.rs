use thiserror::Error;

/// Errors raised by the algebra toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A computation would materialize more than the configured number of elements.
    #[error("budget exceeded: {what} needs {count} but the budget is {limit}{}", hint.as_deref().map(|h| format!(" ({h})")).unwrap_or_default())]
    BudgetExceeded {
        what: String,
        count: u128,
        limit: u64,
        hint: Option<String>,
    },

    /// Malformed input to an operation (bad arity, out-of-range element, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A precondition that can be witnessed failed.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An internal invariant was violated; indicates a bug or a non-affine input.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Text-format parse error.
    #[error("{file}:{line}: {message} (near `{token}`)")]
    Parse {
        file: String,
        line: usize,
        token: String,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::Invariant(msg.into())
}
