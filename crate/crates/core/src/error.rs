use alloc::string::String;

/// Errors raised by the estimators, samplers and protocol post-processing.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its valid domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two objects living on truncated Fock spaces of different sizes.
    #[error("dimension mismatch: expected cutoff {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A state or operator violates one of its invariants.
    #[error("{invariant} violated (residual {residual:e})")]
    InvalidState { invariant: &'static str, residual: f64 },

    /// A quantity that must hold by construction did not (numerical breakdown
    /// or a logic error).
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    /// An integer parameter does not fit the machine integer type.
    #[error("integer overflow: {what} has magnitude 10^{log10:.2}")]
    Overflow { what: &'static str, log10: f64 },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for errors that signal a bug or numerical breakdown rather than
    /// bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Inconsistency(_))
    }
}

pub type Result<T> = core::result::Result<T, Error>;
