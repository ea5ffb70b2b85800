use alloc::string::String;
use core::fmt;

/// Errors raised by the optimizer core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration value is out of its admissible range.
    Config(String),
    /// An operator tag did not match any known operator.
    UnknownTag { kind: &'static str, tag: String },
    /// The evaluation budget has been used up.
    BudgetExhausted,
    /// An internal contract was broken (length mismatch, unevaluated fitness).
    Internal(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::UnknownTag { kind, tag } => write!(f, "unknown {kind} tag `{tag}`"),
            Error::BudgetExhausted => f.write_str("evaluation budget exhausted"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
