use thiserror::Error;

/// Errors produced by the toolkit.
///
/// The variants are grouped by who is at fault: the first three are caller
/// errors (a precondition was violated), the rest indicate that a numerical
/// contract inside the toolkit did not hold.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("sign contract violated: {0}")]
    SignContract(String),

    #[error("discretization quality check failed: {0}")]
    Discretization(String),

    #[error("degenerate mode: {0}")]
    DegenerateMode(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by invalid input rather than by a failed
    /// internal check.
    pub fn is_caller_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Unsupported(_) | Error::Config(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
