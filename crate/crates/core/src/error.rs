use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every operation in the crate.
///
/// The variants fall into three groups that the command line maps to
/// distinct exit codes: malformed input, violated preconditions, and
/// refusals (a cap or search budget was hit, so no verdict was reached).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse group spec `{spec}`: {reason}")]
    Parse { spec: String, reason: String },

    #[error("{what} is {value}, above the configured cap of {cap}")]
    CapExceeded { what: String, value: u128, cap: u128 },

    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("mismatched operands: {0}")]
    Mismatch(String),

    #[error("chain is not a boundary")]
    NotABoundary,

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("cycles are not homologous")]
    NotHomologous,

    #[error("map is not a homomorphism: {0}")]
    NotAHomomorphism(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn cap(what: impl Into<String>, value: u128, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            value,
            cap,
        }
    }

    /// True for cap and budget refusals, as opposed to genuine failures.
    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::BudgetExhausted { .. })
    }
}
