//! Comparison tests for pairs of probabilistic forecasters.
//!
//! Two experts announce, before every binary outcome, the probability they
//! assign to that outcome being `1`. A comparison test looks at the realized
//! play path (outcomes interleaved with both experts' forecasts) and returns
//! one of three verdicts: expert 0 is better informed, expert 1 is, or the
//! evidence is inconclusive.
//!
//! The crate is organised as follows:
//!
//! - [`model`]: outcomes, forecasts, play paths, induced prefix
//!   probabilities and path sampling.
//! - [`strategy`]: the [`ForecastingStrategy`] trait and the shipped
//!   strategy library (IID, Dirac, Bayesian mixtures, time-varying
//!   schedules, prefix forcing).
//! - [`likelihood`]: the streaming log likelihood ratio and the two
//!   ratio-based tests (the derivative test and the likelihood-ratio test).
//! - [`crosscal`]: the cross-calibration test for two experts and the
//!   comparison test it induces.
//! - [`harness`]: Monte Carlo estimation of verdict distributions and
//!   checkers for anonymity, error-freeness, reasonableness, the tail
//!   property, ideal identification and test equivalence.

pub mod crosscal;
mod error;
pub mod harness;
pub mod likelihood;
pub mod model;
pub mod rng;
pub mod strategy;
mod verdict;

pub use crate::error::{Error, Result};
pub use crate::model::{
    average_realization, extend_play_path, induced_prefix_probability, replay_outcomes,
    sample_path, Expert, Forecast, HistoryEntry, Nature, Outcome, PlayPath,
};
pub use crate::strategy::{ForecastingStrategy, StrategyCursor, StrategyRef};
pub use crate::verdict::Verdict;
