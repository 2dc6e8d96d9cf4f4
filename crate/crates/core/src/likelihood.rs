//! Streaming likelihood ratio between the two experts and the two tests
//! built on it.
//!
//! The ratio at time `t` is the product over realized periods of expert 1's
//! probability for the outcome divided by expert 0's. It is tracked in log
//! space; exact zeros in either factor are recorded as absorbing flags
//! instead of being pushed through `ln`.
//!
//! Both tests need limits of the ratio, which no finite run can observe.
//! They are approximated from the current value and the extremes seen since
//! a burn-in index:
//!
//! - derivative test: expert 1 when the ratio is beyond `e^lambda` both now
//!   and at its post-burn-in minimum (expert 0 symmetrically below
//!   `e^-lambda`); a zero factor decides immediately.
//! - likelihood-ratio test: expert 1 when the post-burn-in minimum is above
//!   1, expert 0 when the post-burn-in maximum is below 1.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Expert, HistoryEntry};
use crate::verdict::Verdict;

/// `ln 100`: an error bound of 1% for the derivative test.
pub const DEFAULT_LAMBDA: f64 = 4.605_170_185_988_092;

/// Finite-horizon decision policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictParams {
    pub horizon: usize,
    /// Threshold on `|log ratio|`.
    pub lambda: f64,
    /// Extremes are tracked for `t > burn_in`, so the window is never empty.
    pub burn_in: usize,
}

impl VerdictParams {
    pub fn new(horizon: usize, lambda: f64, burn_in: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{lambda} is not a positive real")));
        }
        if burn_in >= horizon {
            return Err(Error::param(
                "burn_in",
                format!("{burn_in} must be below the horizon {horizon}"),
            ));
        }
        Ok(VerdictParams {
            horizon,
            lambda,
            burn_in,
        })
    }

    /// `lambda = ln 100` and extremes over the second half of the run.
    pub fn with_defaults(horizon: usize) -> Result<Self> {
        Self::new(horizon, DEFAULT_LAMBDA, default_burn_in(horizon))
    }
}

pub fn default_burn_in(horizon: usize) -> usize {
    horizon / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodState {
    pub t: usize,
    /// Sum of `ln f1 - ln f0` over periods where neither factor was zero.
    /// Frozen once either flag is set.
    pub log_ratio: f64,
    /// Some expert-1 factor was exactly 0.
    pub numerator_zero: bool,
    /// Some expert-0 factor was exactly 0.
    pub denominator_zero: bool,
    pub burn_in: usize,
    pub running_min: Option<f64>,
    pub running_max: Option<f64>,
}

impl LikelihoodState {
    pub fn new(burn_in: usize) -> Self {
        LikelihoodState {
            t: 0,
            log_ratio: 0.0,
            numerator_zero: false,
            denominator_zero: false,
            burn_in,
            running_min: None,
            running_max: None,
        }
    }

    /// Runs the state over a whole play path.
    pub fn from_path(path: &[HistoryEntry], burn_in: usize) -> Self {
        path.iter().fold(Self::new(burn_in), |s, e| {
            update_likelihood(s, e.realized_prob(Expert::Zero), e.realized_prob(Expert::One))
        })
    }

    pub fn update(&mut self, f0_prob: f64, f1_prob: f64) {
        debug_assert!((0.0..=1.0).contains(&f0_prob) && (0.0..=1.0).contains(&f1_prob));
        self.t += 1;
        let flagged = self.numerator_zero || self.denominator_zero;
        if f0_prob == 0.0 {
            self.denominator_zero = true;
        }
        if f1_prob == 0.0 {
            self.numerator_zero = true;
        }
        if !flagged && !self.numerator_zero && !self.denominator_zero {
            self.log_ratio += f1_prob.ln() - f0_prob.ln();
        }
        if self.t > self.burn_in {
            let v = self.log_ratio;
            self.running_min = Some(self.running_min.map_or(v, |m| m.min(v)));
            self.running_max = Some(self.running_max.map_or(v, |m| m.max(v)));
        }
    }

    /// The path has probability zero under both experts.
    pub fn is_anomalous(&self) -> bool {
        self.numerator_zero && self.denominator_zero
    }

    /// The ratio `D^t` itself: `0` after a zero numerator, `+inf` after a
    /// zero denominator, `NaN` when both occurred.
    pub fn ratio(&self) -> f64 {
        match (self.numerator_zero, self.denominator_zero) {
            (true, true) => f64::NAN,
            (true, false) => 0.0,
            (false, true) => f64::INFINITY,
            (false, false) => self.log_ratio.exp(),
        }
    }
}

/// Functional form of [`LikelihoodState::update`].
pub fn update_likelihood(mut state: LikelihoodState, f0_prob: f64, f1_prob: f64) -> LikelihoodState {
    state.update(f0_prob, f1_prob);
    state
}

fn check_horizon(state: &LikelihoodState, params: &VerdictParams) -> Result<()> {
    if state.t != params.horizon {
        return Err(Error::BeforeHorizon {
            t: state.t,
            horizon: params.horizon,
        });
    }
    Ok(())
}

/// Finite-horizon derivative test. Paths impossible under both experts
/// yield [`Verdict::Inconclusive`]; callers detect them via
/// [`LikelihoodState::is_anomalous`].
pub fn derivative_verdict(state: &LikelihoodState, params: &VerdictParams) -> Result<Verdict> {
    check_horizon(state, params)?;
    let verdict = match (state.numerator_zero, state.denominator_zero) {
        (true, true) => Verdict::Inconclusive,
        (false, true) => Verdict::Expert1,
        (true, false) => Verdict::Expert0,
        (false, false) => {
            let lambda = params.lambda;
            let cur = state.log_ratio;
            match (state.running_min, state.running_max) {
                (Some(lo), _) if lo > lambda && cur > lambda => Verdict::Expert1,
                (_, Some(hi)) if hi < -lambda && cur < -lambda => Verdict::Expert0,
                _ => Verdict::Inconclusive,
            }
        }
    };
    Ok(verdict)
}

/// Finite-horizon likelihood-ratio test. A log ratio of exactly 0 is
/// inconclusive.
pub fn likelihood_ratio_verdict(state: &LikelihoodState, params: &VerdictParams) -> Result<Verdict> {
    check_horizon(state, params)?;
    let verdict = match (state.numerator_zero, state.denominator_zero) {
        (true, true) => Verdict::Inconclusive,
        (false, true) => Verdict::Expert1,
        (true, false) => Verdict::Expert0,
        (false, false) => match (state.running_min, state.running_max) {
            (Some(lo), _) if lo > 0.0 => Verdict::Expert1,
            (_, Some(hi)) if hi < 0.0 => Verdict::Expert0,
            _ => Verdict::Inconclusive,
        },
    };
    Ok(verdict)
}

/// One row of a likelihood trajectory export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: usize,
    pub log_ratio: f64,
    pub numerator_zero: bool,
    pub denominator_zero: bool,
}

pub fn trajectory(path: &[HistoryEntry]) -> Vec<TrajectoryPoint> {
    let mut state = LikelihoodState::new(0);
    path.iter()
        .map(|e| {
            state.update(e.realized_prob(Expert::Zero), e.realized_prob(Expert::One));
            TrajectoryPoint {
                t: state.t,
                log_ratio: state.log_ratio,
                numerator_zero: state.numerator_zero,
                denominator_zero: state.denominator_zero,
            }
        })
        .collect()
}

/// CSV with header `t,log_ratio,numerator_zero,denominator_zero`.
pub fn write_trajectory_csv<W: Write>(mut w: W, points: &[TrajectoryPoint]) -> io::Result<()> {
    writeln!(w, "t,log_ratio,numerator_zero,denominator_zero")?;
    for p in points {
        writeln!(
            w,
            "{},{:e},{},{}",
            p.t, p.log_ratio, p.numerator_zero as u8, p.denominator_zero as u8
        )?;
    }
    Ok(())
}
