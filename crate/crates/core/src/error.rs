use thiserror::Error;

/// Errors raised by the model, the tests and the harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid outcome symbol {0}; expected 0 or 1")]
    InvalidOutcome(u8),

    #[error("invalid expert index {0}; expected 0 or 1")]
    InvalidExpert(u8),

    /// A mixture's one-step conditional is undefined because every
    /// component assigned zero probability to an outcome that was realized.
    #[error("path has measure zero under a mixture: every component assigned probability 0 to the outcome at t={t}")]
    MeasureZero { t: usize },

    #[error("average realization of an empty outcome sequence")]
    EmptySequence,

    #[error("verdict requested at t={t} but the horizon is {horizon}")]
    BeforeHorizon { t: usize, horizon: usize },

    /// The forced prefix of a tail check must have positive probability
    /// under both experts.
    #[error("forced prefix has zero probability under expert {expert}")]
    ZeroProbabilityPrefix { expert: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
