use std::fmt;

/// Error type for domain violations (arguments outside an operation's
/// mathematical domain, or parameter regimes where a formula is not defined,
/// e.g. `a + c <= 0` where the ruin probability tends to one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Domain(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
