use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a unit: {0}")]
    NotAUnit(String),

    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),

    #[error("tower level mismatch: {0} vs {1} (embed explicitly)")]
    LevelMismatch(u32, u32),

    #[error("insufficient precision: need {required} digits, have {available}")]
    InsufficientPrecision { required: u32, available: u32 },

    #[error("series order exhausted: need order {required}, have {available}")]
    OrderExhausted { required: usize, available: usize },

    #[error("precision exhausted after reaching level {achieved}")]
    PrecisionExhausted { achieved: u32 },

    #[error("value is not divisible by p")]
    NotDivisibleByP,

    #[error("divisor is not a distinguished polynomial: {0}")]
    NotDistinguished(String),

    #[error("hypothesis failed: {0}")]
    Hypothesis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Precision shortfalls are not counterexamples; callers use this to
    /// tell a skipped check from a failed one.
    pub fn is_precision_limit(&self) -> bool {
        matches!(
            self,
            Error::InsufficientPrecision { .. }
                | Error::OrderExhausted { .. }
                | Error::PrecisionExhausted { .. }
        )
    }
}
