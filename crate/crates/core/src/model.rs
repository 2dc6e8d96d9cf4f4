//! Outcomes, forecasts, play paths and the measures a pair of strategies
//! induces over outcome sequences.

use std::fmt;
use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::{ForecastingStrategy, StrategyCursor, StrategyRef};

/// A binary outcome. `Zero < One`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Outcome::One
        } else {
            Outcome::Zero
        }
    }

    pub fn is_one(self) -> bool {
        self == Outcome::One
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Zero => Outcome::One,
            Outcome::One => Outcome::Zero,
        }
    }

    /// Parses a compact string of `0`/`1` symbols, e.g. `"0111"`.
    pub fn parse_seq(s: &str) -> Result<Vec<Outcome>> {
        s.bytes()
            .map(|b| match b {
                b'0' => Ok(Outcome::Zero),
                b'1' => Ok(Outcome::One),
                other => Err(Error::InvalidOutcome(other)),
            })
            .collect()
    }
}

impl TryFrom<u8> for Outcome {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Outcome::Zero),
            1 => Ok(Outcome::One),
            other => Err(Error::InvalidOutcome(other)),
        }
    }
}

impl From<Outcome> for u8 {
    fn from(o: Outcome) -> u8 {
        match o {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Index of one of the two experts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Expert {
    Zero,
    One,
}

impl Expert {
    pub const BOTH: [Expert; 2] = [Expert::Zero, Expert::One];

    pub fn index(self) -> usize {
        match self {
            Expert::Zero => 0,
            Expert::One => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Expert::Zero => Expert::One,
            Expert::One => Expert::Zero,
        }
    }
}

impl TryFrom<u8> for Expert {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Expert::Zero),
            1 => Ok(Expert::One),
            other => Err(Error::InvalidExpert(other)),
        }
    }
}

impl From<Expert> for u8 {
    fn from(e: Expert) -> u8 {
        e.index() as u8
    }
}

/// A distribution over `{0, 1}`, stored as the probability of `1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Forecast(f64);

impl Forecast {
    pub fn new(p1: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p1) {
            Ok(Forecast(p1))
        } else {
            Err(Error::InvalidProbability(p1))
        }
    }

    /// Clamps rounding overshoot (e.g. a mixture summing to `1 + 1e-16`).
    pub(crate) fn saturating(p1: f64) -> Self {
        Forecast(p1.clamp(0.0, 1.0))
    }

    pub fn certain(o: Outcome) -> Self {
        match o {
            Outcome::Zero => Forecast(0.0),
            Outcome::One => Forecast(1.0),
        }
    }

    pub fn p1(self) -> f64 {
        self.0
    }

    /// Probability this forecast assigns to `o`.
    pub fn prob(self, o: Outcome) -> f64 {
        match o {
            Outcome::One => self.0,
            Outcome::Zero => 1.0 - self.0,
        }
    }
}

impl TryFrom<f64> for Forecast {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Forecast::new(v)
    }
}

impl From<Forecast> for f64 {
    fn from(f: Forecast) -> f64 {
        f.0
    }
}

/// One period of a play path: both forecasts, then the realized outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub outcome: Outcome,
    pub forecast0: Forecast,
    pub forecast1: Forecast,
}

impl HistoryEntry {
    pub fn forecast(&self, e: Expert) -> Forecast {
        match e {
            Expert::Zero => self.forecast0,
            Expert::One => self.forecast1,
        }
    }

    /// Probability expert `e` assigned to the realized outcome.
    pub fn realized_prob(&self, e: Expert) -> f64 {
        self.forecast(e).prob(self.outcome)
    }

    pub fn swapped(&self) -> Self {
        HistoryEntry {
            outcome: self.outcome,
            forecast0: self.forecast1,
            forecast1: self.forecast0,
        }
    }
}

/// Finite play path. Dereferences to the slice of its entries, so
/// `&path[..n]` is the prefix of length `n`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayPath {
    entries: Vec<HistoryEntry>,
}

impl PlayPath {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        PlayPath {
            entries: Vec::with_capacity(n),
        }
    }

    pub fn from_entries(entries: Vec<HistoryEntry>) -> Self {
        PlayPath { entries }
    }

    pub fn entries(&self) -> &[HistoryEntry] {
        &self.entries
    }

    /// First `n` entries. Panics if `n > len`.
    pub fn prefix(&self, n: usize) -> &[HistoryEntry] {
        &self.entries[..n]
    }

    /// Entries from index `n` on. Panics if `n > len`.
    pub fn suffix(&self, n: usize) -> &[HistoryEntry] {
        &self.entries[n..]
    }

    pub fn push(&mut self, e: HistoryEntry) {
        self.entries.push(e);
    }

    pub fn outcomes(&self) -> Vec<Outcome> {
        self.entries.iter().map(|e| e.outcome).collect()
    }

    pub fn ones(&self) -> usize {
        self.entries.iter().filter(|e| e.outcome.is_one()).count()
    }

    /// The same path with the experts' forecast columns exchanged.
    pub fn swapped(&self) -> Self {
        PlayPath {
            entries: self.entries.iter().map(HistoryEntry::swapped).collect(),
        }
    }
}

impl Deref for PlayPath {
    type Target = [HistoryEntry];

    fn deref(&self) -> &[HistoryEntry] {
        &self.entries
    }
}

/// Where outcomes come from when simulating.
#[derive(Debug, Clone)]
pub enum Nature {
    /// Outcomes follow the measure induced by expert `i`'s forecasts.
    Expert(Expert),
    /// Outcomes follow a third strategy's conditionals on the joint path.
    External(StrategyRef),
}

/// Appends one period to `h`: both strategies forecast on `h`, then
/// `outcome` is recorded. `h` itself is left untouched.
pub fn extend_play_path(
    h: &PlayPath,
    f0: &dyn ForecastingStrategy,
    f1: &dyn ForecastingStrategy,
    outcome: Outcome,
) -> Result<PlayPath> {
    let forecast0 = f0.forecast(h)?;
    let forecast1 = f1.forecast(h)?;
    let mut next = h.clone();
    next.push(HistoryEntry {
        outcome,
        forecast0,
        forecast1,
    });
    Ok(next)
}

/// Rebuilds the play path `(f0, f1)` induce along a fixed outcome sequence.
pub fn replay_outcomes(
    f0: &dyn ForecastingStrategy,
    f1: &dyn ForecastingStrategy,
    outcomes: &[Outcome],
) -> Result<PlayPath> {
    let mut c0 = f0.cursor();
    let mut c1 = f1.cursor();
    let mut path = PlayPath::with_capacity(outcomes.len());
    for &outcome in outcomes {
        let forecast0 = c0.next_forecast(&path)?;
        let forecast1 = c1.next_forecast(&path)?;
        path.push(HistoryEntry {
            outcome,
            forecast0,
            forecast1,
        });
    }
    Ok(path)
}

/// Probability that expert `i`'s induced measure assigns to the cylinder of
/// `outcomes`: the product of `i`'s one-step forecasts along the jointly
/// induced play path. Accumulated in log space with an exact-zero flag.
///
/// Returns `Ok(0.0)` as soon as a factor is zero, so a rival strategy that
/// becomes undefined after that point does not matter.
pub fn induced_prefix_probability(
    f0: &dyn ForecastingStrategy,
    f1: &dyn ForecastingStrategy,
    i: Expert,
    outcomes: &[Outcome],
) -> Result<f64> {
    let mut c0 = f0.cursor();
    let mut c1 = f1.cursor();
    let mut path = PlayPath::with_capacity(outcomes.len());
    let mut log_p = 0.0f64;
    for &outcome in outcomes {
        let forecast0 = c0.next_forecast(&path)?;
        let forecast1 = c1.next_forecast(&path)?;
        let entry = HistoryEntry {
            outcome,
            forecast0,
            forecast1,
        };
        let factor = entry.realized_prob(i);
        if factor == 0.0 {
            return Ok(0.0);
        }
        log_p += factor.ln();
        path.push(entry);
    }
    Ok(log_p.exp().min(1.0))
}

/// Simulates `horizon` periods. At each step both experts forecast on the
/// current history and the outcome is drawn from the nature source's
/// conditional. The same seed always yields the same path.
pub fn sample_path(
    f0: &dyn ForecastingStrategy,
    f1: &dyn ForecastingStrategy,
    nature: &Nature,
    horizon: usize,
    seed: u64,
) -> Result<PlayPath> {
    if horizon == 0 {
        return Err(Error::param("horizon", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c0 = f0.cursor();
    let mut c1 = f1.cursor();
    let mut external: Option<Box<dyn StrategyCursor + '_>> = match nature {
        Nature::External(s) => Some(s.cursor()),
        Nature::Expert(_) => None,
    };
    let mut path = PlayPath::with_capacity(horizon);
    for _ in 0..horizon {
        let forecast0 = c0.next_forecast(&path)?;
        let forecast1 = c1.next_forecast(&path)?;
        let p1 = match (nature, external.as_mut()) {
            (Nature::Expert(Expert::Zero), _) => forecast0.p1(),
            (Nature::Expert(Expert::One), _) => forecast1.p1(),
            (Nature::External(_), Some(c)) => c.next_forecast(&path)?.p1(),
            (Nature::External(_), None) => unreachable!("external cursor is created up front"),
        };
        // gen::<f64>() is in [0, 1): p1 = 1 always yields One, p1 = 0 never does.
        let outcome = Outcome::from_bool(rng.gen::<f64>() < p1);
        path.push(HistoryEntry {
            outcome,
            forecast0,
            forecast1,
        });
    }
    Ok(path)
}

/// Fraction of ones in a non-empty outcome sequence.
pub fn average_realization(outcomes: &[Outcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptySequence);
    }
    let ones = outcomes.iter().filter(|o| o.is_one()).count();
    Ok(ones as f64 / outcomes.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::{
        claim1_pair, dirac_strategy, example_b1_pair, iid_strategy, DiracTarget,
    };

    fn seq(s: &str) -> Vec<Outcome> {
        Outcome::parse_seq(s).unwrap()
    }

    #[test]
    fn extend_records_forecasts_and_leaves_input_alone() {
        let f = iid_strategy(0.5).unwrap();
        let h = PlayPath::new();
        let next = extend_play_path(&h, &*f, &*f, Outcome::One).unwrap();
        assert!(h.is_empty());
        assert_eq!(next.len(), 1);
        assert_eq!(
            next[0],
            HistoryEntry {
                outcome: Outcome::One,
                forecast0: Forecast(0.5),
                forecast1: Forecast(0.5)
            }
        );
    }

    #[test]
    fn extend_with_dirac_strategies() {
        let ones = dirac_strategy(DiracTarget::constant(Outcome::One));
        let zeros = dirac_strategy(DiracTarget::constant(Outcome::Zero));
        let h = replay_outcomes(&*ones, &*zeros, &seq("101")).unwrap();
        let next = extend_play_path(&h, &*ones, &*zeros, Outcome::Zero).unwrap();
        assert_eq!(next.len(), 4);
        assert_eq!(next[3].forecast0.p1(), 1.0);
        assert_eq!(next[3].forecast1.p1(), 0.0);
    }

    #[test]
    fn example_b1_second_expert_first_forecast() {
        let (f0, f1) = example_b1_pair();
        let next = extend_play_path(&PlayPath::new(), &*f0, &*f1, Outcome::One).unwrap();
        assert!((next[0].forecast1.p1() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(next[0].forecast0.p1(), 0.75);
    }

    #[test]
    fn induced_probability_examples() {
        let half = iid_strategy(0.5).unwrap();
        let p = induced_prefix_probability(&*half, &*half, Expert::Zero, &seq("101")).unwrap();
        assert!((p - 0.125).abs() < 1e-15);
        assert_eq!(
            induced_prefix_probability(&*half, &*half, Expert::One, &[]).unwrap(),
            1.0
        );

        let (f0, f1) = example_b1_pair();
        let p0 = induced_prefix_probability(&*f0, &*f1, Expert::Zero, &seq("11")).unwrap();
        let p1 = induced_prefix_probability(&*f0, &*f1, Expert::One, &seq("11")).unwrap();
        assert!((p0 - 0.625).abs() < 1e-12);
        assert!((p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_factor_gives_exact_zero() {
        let (f0, f1) = claim1_pair(0.1).unwrap();
        let p = induced_prefix_probability(&*f0, &*f1, Expert::One, &seq("01")).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn sample_path_dirac_nature_ignores_seed() {
        let ones = dirac_strategy(DiracTarget::constant(Outcome::One));
        let half = iid_strategy(0.5).unwrap();
        for seed in 0..20 {
            let p = sample_path(&*ones, &*half, &Nature::Expert(Expert::Zero), 30, seed).unwrap();
            assert_eq!(p.len(), 30);
            assert_eq!(p.ones(), 30);
        }
    }

    #[test]
    fn sample_path_claim1_second_expert_is_all_ones() {
        let (f0, f1) = claim1_pair(0.1).unwrap();
        for seed in 0..50 {
            let p = sample_path(&*f0, &*f1, &Nature::Expert(Expert::One), 25, seed).unwrap();
            assert_eq!(p.ones(), 25);
        }
    }

    #[test]
    fn sample_path_claim1_first_outcome_frequency() {
        // Exact value 1 - eps.
        let (f0, f1) = claim1_pair(0.1).unwrap();
        let n = 10_000;
        let hits = (0..n)
            .filter(|&seed| {
                sample_path(&*f0, &*f1, &Nature::Expert(Expert::Zero), 1, seed as u64).unwrap()[0]
                    .outcome
                    .is_one()
            })
            .count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.9).abs() <= 0.01, "freq = {freq}");
    }

    #[test]
    fn sample_path_is_deterministic_per_seed() {
        let (f0, f1) = example_b1_pair();
        let a = sample_path(&*f0, &*f1, &Nature::Expert(Expert::Zero), 64, 7).unwrap();
        let b = sample_path(&*f0, &*f1, &Nature::Expert(Expert::Zero), 64, 7).unwrap();
        assert_eq!(a, b);
        assert!(sample_path(&*f0, &*f1, &Nature::Expert(Expert::Zero), 0, 7).is_err());
    }

    #[test]
    fn external_nature_drives_outcomes() {
        let half = iid_strategy(0.5).unwrap();
        let zeros: StrategyRef = dirac_strategy(DiracTarget::constant(Outcome::Zero));
        let p = sample_path(&*half, &*half, &Nature::External(zeros), 40, 3).unwrap();
        assert_eq!(p.ones(), 0);
    }

    #[test]
    fn average_realization_examples() {
        assert_eq!(average_realization(&seq("1101")).unwrap(), 0.75);
        assert_eq!(average_realization(&vec![Outcome::One; 100]).unwrap(), 1.0);
        assert_eq!(average_realization(&[]), Err(Error::EmptySequence));
    }

    #[test]
    fn average_realization_concentrates() {
        // Binomial(2000, 0.3): sd of the mean is about 0.0102, so 0.03 is ~2.9 sd.
        let f = iid_strategy(0.3).unwrap();
        let mut inside = 0;
        for seed in 0..200 {
            let p = sample_path(&*f, &*f, &Nature::Expert(Expert::Zero), 2000, seed).unwrap();
            let a = average_realization(&p.outcomes()).unwrap();
            if (a - 0.3).abs() <= 0.03 {
                inside += 1;
            }
        }
        assert!(inside >= 198, "inside = {inside}");
    }

    #[test]
    fn prefix_and_suffix() {
        let f = iid_strategy(0.5).unwrap();
        let p = replay_outcomes(&*f, &*f, &seq("0110")).unwrap();
        assert!(p.prefix(0).is_empty());
        assert_eq!(p.prefix(2).len(), 2);
        assert_eq!(p.suffix(1).len(), 3);
        assert_eq!(p.suffix(1)[0].outcome, Outcome::One);
        assert_eq!(p.swapped().swapped(), p);
    }

    #[test]
    fn forecast_validation() {
        assert!(Forecast::new(1.01).is_err());
        assert!(Forecast::new(-0.0).is_ok());
        assert!(Forecast::new(f64::NAN).is_err());
        assert_eq!(Forecast::new(0.3).unwrap().prob(Outcome::Zero), 0.7);
    }
}
