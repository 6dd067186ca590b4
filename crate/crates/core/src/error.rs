use std::error::Error as StdError;
use std::fmt;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated (bad range, bad order,
    /// mismatched lengths, unparsable input, ...).
    InvalidArgument(String),
    /// The regularized quotient b(sigma, s) was non-positive somewhere on the
    /// quadrature grid, so the log-kernel integrals are undefined. This is the
    /// runtime signature of a symbol that is not simple-loop.
    NonPositiveQuotient { theta: f64, value: f64 },
    /// An iteration failed to converge within its cap. Must not occur for
    /// symmetric input; treated as an internal failure.
    NoConvergence(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NonPositiveQuotient { theta, value } => write!(
                f,
                "quotient b(sigma, s) is not positive at sigma = {theta}: got {value} \
                 (symbol is not simple-loop)"
            ),
            Error::NoConvergence(msg) => write!(f, "no convergence: {msg}"),
        }
    }
}

impl StdError for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
