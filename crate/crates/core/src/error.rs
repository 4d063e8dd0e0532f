use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Caller supplied parameters outside the supported domain.
    #[error("usage error: {0}")]
    Usage(String),

    /// Mathematically undefined input, e.g. inverting zero.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested result is only defined under a hypothesis the input violates.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// An enumeration oracle refused to run because the instance is too large.
    #[error("instance too large for enumeration: work {work} exceeds gate {gate}")]
    GateExceeded { work: u128, gate: u128 },

    /// An exactness or structural invariant failed. Always a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure_invariant {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Invariant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure_invariant;
