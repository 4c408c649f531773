use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure classes surfaced by the solver.
///
/// The variants are coarse on purpose: the CLI maps each one onto a distinct
/// exit status, so a new variant is a new exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function (negative Bessel
    /// argument, `R <= 0`, ...).
    #[error("{func}: argument out of domain: {msg}")]
    Domain { func: &'static str, msg: String },

    /// A physical or numerical parameter violates a documented constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative procedure did not reach its tolerance.
    #[error("{what} did not converge after {iterations} iterations: {detail}")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        detail: String,
    },

    /// Integration broke down (step underflow, overflow, collapsed Wronskian).
    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    /// The matching formula hits a pole of `J0(q r0) / J1(q r0)`.
    #[error("resonance: {0}")]
    Resonance(String),

    /// Amplitude extraction depends on the fit window more than allowed.
    #[error("amplitude extraction unreliable: {0}")]
    ExtractionUnstable(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
