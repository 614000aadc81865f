//! Error type shared by every module in the crate.

use std::fmt;

/// Errors produced by library operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A mathematical precondition was violated (degree, field, range, ...).
    Domain(String),
    /// Exact integer arithmetic would leave the representable range.
    Overflow(String),
    /// The requested search is larger than the configured cap.
    Budget { estimated: u64, cap: u64 },
    /// A text record could not be parsed. `line` is 1-based; 0 means the
    /// input was not line-oriented (for example a flag value).
    Parse { line: usize, message: String },
    /// The operation observed its cancel flag between work items.
    Canceled,
}

/// Coarse error class, used to map errors onto distinct process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Parse,
    Domain,
    Budget,
    Canceled,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parse { .. } => ErrorCategory::Parse,
            Error::Domain(_) | Error::Overflow(_) => ErrorCategory::Domain,
            Error::Budget { .. } => ErrorCategory::Budget,
            Error::Canceled => ErrorCategory::Canceled,
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Overflow(msg) => write!(f, "arithmetic overflow: {msg}"),
            Error::Budget { estimated, cap } => {
                write!(f, "budget exceeded: {estimated} evaluations requested, cap is {cap}")
            }
            Error::Parse { line, message } => {
                if *line == 0 {
                    write!(f, "parse error: {message}")
                } else {
                    write!(f, "parse error at line {line}: {message}")
                }
            }
            Error::Canceled => write!(f, "canceled"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
