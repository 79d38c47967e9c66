use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed text (fractions, hypernumbers, element names).
    #[error("parse error: {0}")]
    Parse(String),

    /// Input that does not have the required shape: wrong table dimensions,
    /// out-of-range indices, missing fields, partial maps.
    #[error("structural error in `{field}`: {message}")]
    Structural { field: String, message: String },

    /// The input is well-formed but an operation's precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A decomposition identity that must hold on valid input did not.
    #[error("identity `{identity}` violated at {witness}: {lhs} != {rhs}")]
    TheoremViolation {
        identity: String,
        witness: String,
        lhs: String,
        rhs: String,
    },

    /// Inconsistent intermediate data, e.g. an ill-defined map on classes.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn structural(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Structural {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True when the error reports a failed check rather than bad input.
    pub fn is_check_failure(&self) -> bool {
        matches!(self, Error::TheoremViolation { .. } | Error::Internal(_))
    }
}
