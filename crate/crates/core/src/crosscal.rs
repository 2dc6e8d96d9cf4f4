//! Cross-calibration for two experts.
//!
//! `[0, 1]` is cut into `N` closed intervals `[(j-1)/N, j/N]`. Each period
//! the pair of announced forecasts selects a profile `(j0, j1)`; per
//! profile the number of visits and the number of ones are counted. An
//! expert passes when, on every profile visited often enough, the
//! frequency of ones lies within `1/(2N)` of the midpoint of the interval
//! that expert announced.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Expert, Forecast, HistoryEntry, Outcome};
use crate::verdict::Verdict;

/// Absorbs floating-point noise at interval boundaries and band edges.
const EDGE_EPS: f64 = 1e-9;

/// Smallest `j` in `1..=n` with `p` in `[(j-1)/n, j/n]`, so a boundary
/// point `k/n` maps to `k`. Requires `n > 4`.
pub fn interval_index(p: f64, n: u32) -> u32 {
    debug_assert!((0.0..=1.0).contains(&p));
    let j = (p * n as f64 - EDGE_EPS).ceil();
    (j.max(1.0) as u32).min(n)
}

/// Visit count and number of ones for one forecast profile.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileCounts {
    pub nu: u64,
    pub ones_sum: u64,
}

impl ProfileCounts {
    /// Conditional frequency of ones; `None` before the first visit.
    pub fn frequency(&self) -> Option<f64> {
        (self.nu > 0).then(|| self.ones_sum as f64 / self.nu as f64)
    }
}

/// Key `(j0, j1)`: interval indices announced by expert 0 and expert 1.
pub type Profile = (u32, u32);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCalibState {
    n: u32,
    t: u64,
    table: BTreeMap<Profile, ProfileCounts>,
}

impl CrossCalibState {
    pub fn new(n: u32) -> Result<Self> {
        if n <= 4 {
            return Err(Error::param("n", format!("{n} subintervals; need more than 4")));
        }
        Ok(CrossCalibState {
            n,
            t: 0,
            table: BTreeMap::new(),
        })
    }

    pub fn from_path(path: &[HistoryEntry], n: u32) -> Result<Self> {
        let mut s = Self::new(n)?;
        for e in path {
            s.update(e.forecast0, e.forecast1, e.outcome);
        }
        Ok(s)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn profiles(&self) -> &BTreeMap<Profile, ProfileCounts> {
        &self.table
    }

    pub fn update(&mut self, forecast0: Forecast, forecast1: Forecast, outcome: Outcome) {
        let key = (
            interval_index(forecast0.p1(), self.n),
            interval_index(forecast1.p1(), self.n),
        );
        let c = self.table.entry(key).or_default();
        c.nu += 1;
        c.ones_sum += outcome.is_one() as u64;
        self.t += 1;
    }

    /// Midpoint `(2j - 1) / (2N)` of interval `j`.
    pub fn midpoint(&self, j: u32) -> f64 {
        (2 * j - 1) as f64 / (2 * self.n) as f64
    }

    pub fn band(&self) -> f64 {
        1.0 / (2 * self.n) as f64
    }
}

/// Functional form of [`CrossCalibState::update`].
pub fn update_cross_calibration(
    mut state: CrossCalibState,
    forecast0: Forecast,
    forecast1: Forecast,
    outcome: Outcome,
) -> CrossCalibState {
    state.update(forecast0, forecast1, outcome);
    state
}

/// Finite-sample stand-ins for "occurs infinitely often" and the limsup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCalibParams {
    /// Profiles visited fewer times are ignored.
    pub min_count: u64,
    /// Added to the `1/(2N)` band.
    pub slack: f64,
}

impl CrossCalibParams {
    pub const DEFAULT_MIN_COUNT: u64 = 25;
    pub const DEFAULT_SLACK: f64 = 0.02;

    pub fn new(min_count: u64, slack: f64) -> Result<Self> {
        if min_count == 0 {
            return Err(Error::param("min_count", "must be at least 1"));
        }
        if !(slack >= 0.0 && slack.is_finite()) {
            return Err(Error::param("slack", format!("{slack} is not a nonnegative real")));
        }
        Ok(CrossCalibParams { min_count, slack })
    }
}

impl Default for CrossCalibParams {
    fn default() -> Self {
        CrossCalibParams {
            min_count: Self::DEFAULT_MIN_COUNT,
            slack: Self::DEFAULT_SLACK,
        }
    }
}

/// Whether expert `i` passes on the current state. Vacuously true when no
/// profile reaches `min_count`.
pub fn cross_calibration_pass(state: &CrossCalibState, i: Expert, params: &CrossCalibParams) -> bool {
    let limit = state.band() + params.slack + EDGE_EPS;
    state
        .table
        .iter()
        .filter(|(_, c)| c.nu >= params.min_count)
        .all(|(&(j0, j1), c)| {
            let j = match i {
                Expert::Zero => j0,
                Expert::One => j1,
            };
            let freq = c.frequency().expect("nu >= min_count >= 1");
            (freq - state.midpoint(j)).abs() <= limit
        })
}

/// Comparison test induced by the two pass/fail decisions.
pub fn cross_comparison_verdict(pass0: bool, pass1: bool) -> Verdict {
    match (pass0, pass1) {
        (true, false) => Verdict::Expert0,
        (false, true) => Verdict::Expert1,
        _ => Verdict::Inconclusive,
    }
}

/// Convenience: the induced comparison verdict on a whole path.
pub fn cross_verdict_on_path(
    path: &[HistoryEntry],
    n: u32,
    params: &CrossCalibParams,
) -> Result<Verdict> {
    let state = CrossCalibState::from_path(path, n)?;
    Ok(cross_comparison_verdict(
        cross_calibration_pass(&state, Expert::Zero, params),
        cross_calibration_pass(&state, Expert::One, params),
    ))
}

/// CSV with header `l0,l1,nu,ones_sum,freq,midpoint0,midpoint1,band`.
pub fn write_profiles_csv<W: Write>(mut w: W, state: &CrossCalibState) -> io::Result<()> {
    writeln!(w, "l0,l1,nu,ones_sum,freq,midpoint0,midpoint1,band")?;
    for (&(j0, j1), c) in &state.table {
        writeln!(
            w,
            "{},{},{},{},{:e},{:e},{:e},{:e}",
            j0,
            j1,
            c.nu,
            c.ones_sum,
            c.frequency().unwrap_or(f64::NAN),
            state.midpoint(j0),
            state.midpoint(j1),
            state.band()
        )?;
    }
    Ok(())
}
