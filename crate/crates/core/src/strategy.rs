//! Forecasting strategies.
//!
//! A strategy maps a finite play-path prefix to a forecast for the next
//! period. It sees the whole joint history, including the rival's past
//! forecasts, though none of the shipped strategies look at them.
//!
//! Strategies are pure. For simulation they also hand out a
//! [`StrategyCursor`], which produces the same forecasts incrementally as
//! the path grows one period at a time.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Forecast, HistoryEntry, Outcome};

pub type StrategyRef = Arc<dyn ForecastingStrategy>;

pub trait ForecastingStrategy: fmt::Debug + Send + Sync {
    /// Forecast for period `history.len() + 1`.
    fn forecast(&self, history: &[HistoryEntry]) -> Result<Forecast>;

    /// Incremental evaluator. The default re-evaluates [`forecast`] on every
    /// call, which is right for strategies that need no accumulated state.
    ///
    /// [`forecast`]: ForecastingStrategy::forecast
    fn cursor(&self) -> Box<dyn StrategyCursor + '_> {
        Box::new(Stateless(self))
    }
}

/// Incremental forecaster. Successive calls must pass histories that extend
/// the previously passed ones (the same history twice is allowed); the
/// result equals `forecast(history)` of the owning strategy.
pub trait StrategyCursor {
    fn next_forecast(&mut self, history: &[HistoryEntry]) -> Result<Forecast>;
}

struct Stateless<'a, S: ?Sized>(&'a S);

impl<S: ForecastingStrategy + ?Sized> StrategyCursor for Stateless<'_, S> {
    fn next_forecast(&mut self, history: &[HistoryEntry]) -> Result<Forecast> {
        self.0.forecast(history)
    }
}

/// An infinite outcome sequence of the form `prefix` followed by `tail`
/// repeated forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiracTarget {
    pub prefix: Vec<Outcome>,
    pub tail: Outcome,
}

impl DiracTarget {
    pub fn new(prefix: Vec<Outcome>, tail: Outcome) -> Self {
        DiracTarget { prefix, tail }
    }

    pub fn constant(tail: Outcome) -> Self {
        DiracTarget {
            prefix: Vec::new(),
            tail,
        }
    }

    /// Symbol at 0-based index `k`.
    pub fn symbol(&self, k: usize) -> Outcome {
        self.prefix.get(k).copied().unwrap_or(self.tail)
    }

    /// True when `outcomes` is a prefix of the target sequence.
    pub fn matches(&self, outcomes: impl IntoIterator<Item = Outcome>) -> bool {
        outcomes
            .into_iter()
            .enumerate()
            .all(|(k, o)| self.symbol(k) == o)
    }
}

#[derive(Debug, Clone)]
pub struct Iid {
    p: Forecast,
}

impl ForecastingStrategy for Iid {
    fn forecast(&self, _history: &[HistoryEntry]) -> Result<Forecast> {
        Ok(self.p)
    }
}

/// Forecasts the next symbol of a fixed sequence with certainty.
#[derive(Debug, Clone)]
pub struct Dirac {
    target: DiracTarget,
}

impl ForecastingStrategy for Dirac {
    fn forecast(&self, history: &[HistoryEntry]) -> Result<Forecast> {
        Ok(Forecast::certain(self.target.symbol(history.len())))
    }
}

/// Forecasts `schedule(t)` in period `t` (1-based), ignoring the history.
#[derive(Clone)]
pub struct TimeVarying {
    schedule: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
}

impl fmt::Debug for TimeVarying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeVarying").finish_non_exhaustive()
    }
}

impl ForecastingStrategy for TimeVarying {
    fn forecast(&self, history: &[HistoryEntry]) -> Result<Forecast> {
        Forecast::new((self.schedule)(history.len() + 1))
    }
}

/// Announces `first` in period 1 and follows `then` afterwards.
#[derive(Debug, Clone)]
pub struct DayOne {
    first: Forecast,
    then: StrategyRef,
}

impl ForecastingStrategy for DayOne {
    fn forecast(&self, history: &[HistoryEntry]) -> Result<Forecast> {
        if history.is_empty() {
            Ok(self.first)
        } else {
            self.then.forecast(history)
        }
    }

    fn cursor(&self) -> Box<dyn StrategyCursor + '_> {
        Box::new(DayOneCursor {
            first: self.first,
            then: self.then.cursor(),
        })
    }
}

struct DayOneCursor<'a> {
    first: Forecast,
    then: Box<dyn StrategyCursor + 'a>,
}

impl StrategyCursor for DayOneCursor<'_> {
    fn next_forecast(&mut self, history: &[HistoryEntry]) -> Result<Forecast> {
        if history.is_empty() {
            Ok(self.first)
        } else {
            self.then.next_forecast(history)
        }
    }
}

/// Bayesian mixture of strategies whose forecasts depend on outcomes only.
///
/// The posterior weights are kept in linear space and renormalized after
/// every outcome. A component whose weight reaches zero stays at zero.
#[derive(Debug, Clone)]
pub struct Mixture {
    components: Vec<(f64, StrategyRef)>,
}

impl ForecastingStrategy for Mixture {
    fn forecast(&self, history: &[HistoryEntry]) -> Result<Forecast> {
        self.cursor().next_forecast(history)
    }

    fn cursor(&self) -> Box<dyn StrategyCursor + '_> {
        Box::new(MixtureCursor {
            weights: self.components.iter().map(|(w, _)| *w).collect(),
            cursors: self.components.iter().map(|(_, s)| s.cursor()).collect(),
            cached: None,
            seen: 0,
        })
    }
}

struct MixtureCursor<'a> {
    weights: Vec<f64>,
    cursors: Vec<Box<dyn StrategyCursor + 'a>>,
    /// Component forecasts on the prefix of length `seen`.
    cached: Option<Vec<Forecast>>,
    seen: usize,
}

impl MixtureCursor<'_> {
    fn component_forecasts(&mut self, history: &[HistoryEntry]) -> Result<Vec<Forecast>> {
        self.weights
            .iter()
            .zip(self.cursors.iter_mut())
            .map(|(&w, c)| {
                if w > 0.0 {
                    c.next_forecast(history)
                } else {
                    // dropped component; never read again
                    Ok(Forecast::certain(Outcome::Zero))
                }
            })
            .collect()
    }
}

impl StrategyCursor for MixtureCursor<'_> {
    fn next_forecast(&mut self, history: &[HistoryEntry]) -> Result<Forecast> {
        while self.seen < history.len() {
            let forecasts = match self.cached.take() {
                Some(f) => f,
                None => self.component_forecasts(&history[..self.seen])?,
            };
            let outcome = history[self.seen].outcome;
            let mut total = 0.0;
            for (w, f) in self.weights.iter_mut().zip(&forecasts) {
                if *w > 0.0 {
                    *w *= f.prob(outcome);
                    total += *w;
                }
            }
            if total <= 0.0 {
                return Err(Error::MeasureZero { t: self.seen + 1 });
            }
            for w in &mut self.weights {
                *w /= total;
            }
            self.seen += 1;
        }
        let forecasts = match self.cached.take() {
            Some(f) => f,
            None => self.component_forecasts(history)?,
        };
        let p1 = self
            .weights
            .iter()
            .zip(&forecasts)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, f)| w * f.p1())
            .sum::<f64>();
        self.cached = Some(forecasts);
        Ok(Forecast::saturating(p1))
    }
}

/// Forces the outcome prefix `forced[..n-1]`: on that prefix the forecast
/// puts probability 1 on the next forced symbol, off it probability 1 on
/// the complement of the next forced symbol. From period `n` on it
/// delegates to `base` on the actual history.
#[derive(Debug, Clone)]
pub struct PrefixForced {
    base: StrategyRef,
    forced: Vec<Outcome>,
    n: usize,
}

impl PrefixForced {
    fn forced_forecast(&self, history: &[HistoryEntry]) -> Forecast {
        let k = history.len();
        let on_path = history
            .iter()
            .zip(&self.forced)
            .all(|(e, &o)| e.outcome == o);
        if on_path {
            Forecast::certain(self.forced[k])
        } else {
            Forecast::certain(self.forced[k].flip())
        }
    }
}

impl ForecastingStrategy for PrefixForced {
    fn forecast(&self, history: &[HistoryEntry]) -> Result<Forecast> {
        if history.len() + 1 < self.n {
            Ok(self.forced_forecast(history))
        } else {
            self.base.forecast(history)
        }
    }

    fn cursor(&self) -> Box<dyn StrategyCursor + '_> {
        Box::new(PrefixForcedCursor {
            strategy: self,
            base: self.base.cursor(),
        })
    }
}

struct PrefixForcedCursor<'a> {
    strategy: &'a PrefixForced,
    base: Box<dyn StrategyCursor + 'a>,
}

impl StrategyCursor for PrefixForcedCursor<'_> {
    fn next_forecast(&mut self, history: &[HistoryEntry]) -> Result<Forecast> {
        if history.len() + 1 < self.strategy.n {
            Ok(self.strategy.forced_forecast(history))
        } else {
            self.base.next_forecast(history)
        }
    }
}

fn check_prob(name: &'static str, p: f64) -> Result<Forecast> {
    Forecast::new(p).map_err(|_| Error::param(name, format!("{p} is not a probability")))
}

pub fn iid_strategy(p: f64) -> Result<StrategyRef> {
    Ok(Arc::new(Iid {
        p: check_prob("p", p)?,
    }))
}

pub fn dirac_strategy(target: DiracTarget) -> StrategyRef {
    Arc::new(Dirac { target })
}

/// Builds a mixture. Weights must be positive and sum to one (within 1e-9).
pub fn mixture_strategy(components: Vec<(f64, StrategyRef)>) -> Result<StrategyRef> {
    if components.is_empty() {
        return Err(Error::param("components", "mixture needs at least one component"));
    }
    if let Some((w, _)) = components.iter().find(|(w, _)| !(*w > 0.0 && *w <= 1.0)) {
        return Err(Error::param("weight", format!("{w} is not in (0, 1]")));
    }
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::param("weight", format!("weights sum to {total}, not 1")));
    }
    Ok(Arc::new(Mixture { components }))
}

/// `schedule` receives the 1-based period and must return a probability;
/// a value outside `[0, 1]` surfaces as an error when it is evaluated.
pub fn time_varying_strategy<F>(schedule: F) -> StrategyRef
where
    F: Fn(usize) -> f64 + Send + Sync + 'static,
{
    Arc::new(TimeVarying {
        schedule: Arc::new(schedule),
    })
}

pub fn day_one_strategy(first: f64, then: StrategyRef) -> Result<StrategyRef> {
    Ok(Arc::new(DayOne {
        first: check_prob("first", first)?,
        then,
    }))
}

/// Forces `forced[..n-1]` before delegating to `f` from period `n` on.
/// With `n = 1` the result forecasts exactly like `f`.
pub fn prefix_forced_strategy(
    f: StrategyRef,
    forced: Vec<Outcome>,
    n: usize,
) -> Result<StrategyRef> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if forced.len() + 1 < n {
        return Err(Error::param(
            "forced",
            format!("needs at least n-1 = {} symbols, got {}", n - 1, forced.len()),
        ));
    }
    Ok(Arc::new(PrefixForced { base: f, forced, n }))
}

/// Expert 1 predicts the all-ones sequence with certainty; expert 0 puts
/// `1 - epsilon` on a one in period 1 and agrees with expert 1 afterwards.
pub fn claim1_pair(epsilon: f64) -> Result<(StrategyRef, StrategyRef)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", format!("{epsilon} is not in (0, 1)")));
    }
    let ones = dirac_strategy(DiracTarget::constant(Outcome::One));
    let f0 = day_one_strategy(1.0 - epsilon, ones.clone())?;
    Ok((f0, ones))
}

/// Expert 0 predicts `(0, 1, 1, ...)`, expert 1 predicts `(1, 1, 1, ...)`,
/// both with certainty.
pub fn claim2_pair() -> (StrategyRef, StrategyRef) {
    let f0 = dirac_strategy(DiracTarget::new(vec![Outcome::Zero], Outcome::One));
    let f1 = dirac_strategy(DiracTarget::constant(Outcome::One));
    (f0, f1)
}

/// Expert 0 is the even mixture of "all ones" and fair coin flips; expert 1
/// forecasts `1 - 1/(t+2)` in period `t`. Every finite history has positive
/// probability under both.
pub fn example_b1_pair() -> (StrategyRef, StrategyRef) {
    let f0 = mixture_strategy(vec![
        (0.5, dirac_strategy(DiracTarget::constant(Outcome::One))),
        (0.5, iid_strategy(0.5).expect("valid")),
    ])
    .expect("valid weights");
    let f1 = time_varying_strategy(|t| 1.0 - 1.0 / (t as f64 + 2.0));
    (f0, f1)
}

/// Expert 0 is the even mixture of IID(0.5) and IID(0.3); expert 1 is
/// IID(0.5). Expert 1's measure is absolutely continuous w.r.t. expert 0's.
pub fn absolutely_continuous_pair() -> (StrategyRef, StrategyRef) {
    let half = iid_strategy(0.5).expect("valid");
    let f0 = mixture_strategy(vec![
        (0.5, half.clone()),
        (0.5, iid_strategy(0.3).expect("valid")),
    ])
    .expect("valid weights");
    (f0, half)
}

/// Two strategies that agree on certainty of a one from period 2 on; in
/// period 1 the first puts 1/2 on a one and the second puts 1.
pub fn non_tail_pair() -> (StrategyRef, StrategyRef) {
    let certain_one = iid_strategy(1.0).expect("valid");
    let half_first = day_one_strategy(0.5, certain_one.clone()).expect("valid");
    (half_first, certain_one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{replay_outcomes, PlayPath};

    fn path(f: &StrategyRef, outcomes: &str) -> PlayPath {
        replay_outcomes(&**f, &**f, &Outcome::parse_seq(outcomes).unwrap()).unwrap()
    }

    fn p1(f: &StrategyRef, outcomes: &str) -> f64 {
        f.forecast(&path(f, outcomes)).unwrap().p1()
    }

    #[test]
    fn iid_ignores_history() {
        let f = iid_strategy(0.5).unwrap();
        assert_eq!(p1(&f, ""), 0.5);
        let g = iid_strategy(0.7).unwrap();
        assert_eq!(p1(&g, &"10".repeat(50)), 0.7);
        let z = iid_strategy(0.0).unwrap();
        assert_eq!(p1(&z, "000"), 0.0);
        assert!(iid_strategy(1.5).is_err());
    }

    #[test]
    fn dirac_targets() {
        let ones = dirac_strategy(DiracTarget::constant(Outcome::One));
        assert_eq!(p1(&ones, "1111"), 1.0);
        let (w0, _) = claim2_pair();
        assert_eq!(p1(&w0, ""), 0.0);
        assert_eq!(p1(&w0, "0"), 1.0);
        // depends on the time index only
        assert_eq!(p1(&w0, "1"), 1.0);
        let zeros = dirac_strategy(DiracTarget::constant(Outcome::Zero));
        assert_eq!(p1(&zeros, "0101"), 0.0);
    }

    #[test]
    fn mixture_posterior_examples() {
        let (f0, _) = example_b1_pair();
        assert_eq!(p1(&f0, ""), 0.75);
        assert!((p1(&f0, "11") - 0.9).abs() < 1e-15);
        assert_eq!(p1(&f0, "0"), 0.5);
        assert_eq!(p1(&f0, "110111"), 0.5);
    }

    #[test]
    fn mixture_all_zero_is_an_error() {
        let m = mixture_strategy(vec![
            (0.5, dirac_strategy(DiracTarget::constant(Outcome::One))),
            (0.5, dirac_strategy(DiracTarget::new(vec![Outcome::One], Outcome::Zero))),
        ])
        .unwrap();
        let ones = dirac_strategy(DiracTarget::constant(Outcome::One));
        let h = replay_outcomes(&*ones, &*ones, &Outcome::parse_seq("0").unwrap()).unwrap();
        // both components are certain of a one in period 1
        assert_eq!(m.forecast(&h), Err(Error::MeasureZero { t: 1 }));
        let h = replay_outcomes(&*ones, &*ones, &Outcome::parse_seq("10").unwrap()).unwrap();
        assert_eq!(m.forecast(&h[..1]).unwrap().p1(), 0.5);
        assert_eq!(m.forecast(&h).unwrap().p1(), 0.0);
    }

    #[test]
    fn mixture_validation() {
        let f = iid_strategy(0.5).unwrap();
        assert!(mixture_strategy(vec![]).is_err());
        assert!(mixture_strategy(vec![(0.5, f.clone())]).is_err());
        assert!(mixture_strategy(vec![(0.0, f.clone()), (1.0, f.clone())]).is_err());
        assert!(mixture_strategy(vec![(1.0, f)]).is_ok());
    }

    #[test]
    fn mixture_cursor_matches_pure_forecast() {
        let (f0, f1) = absolutely_continuous_pair();
        let outcomes = Outcome::parse_seq("0110100011101").unwrap();
        let h = replay_outcomes(&*f0, &*f1, &outcomes).unwrap();
        for n in 0..h.len() {
            assert_eq!(h[n].forecast0, f0.forecast(&h[..n]).unwrap());
        }
        let mut c = f0.cursor();
        // skipping ahead is allowed: the cursor catches up
        assert_eq!(c.next_forecast(&h[..7]).unwrap(), f0.forecast(&h[..7]).unwrap());
        assert_eq!(c.next_forecast(&h[..7]).unwrap(), f0.forecast(&h[..7]).unwrap());
        assert_eq!(c.next_forecast(&h).unwrap(), f0.forecast(&h).unwrap());
    }

    #[test]
    fn time_varying_schedule() {
        let (_, f1) = example_b1_pair();
        assert!((p1(&f1, "") - 2.0 / 3.0).abs() < 1e-15);
        assert!((p1(&f1, "1111111") - 0.9).abs() < 1e-15);
        let c = time_varying_strategy(|_| 0.5);
        let iid = iid_strategy(0.5).unwrap();
        for h in ["", "0", "0110"] {
            assert_eq!(p1(&c, h), p1(&iid, h));
        }
        let bad = time_varying_strategy(|t| t as f64);
        assert!(bad.forecast(&path(&iid, "01")).is_err());
    }

    #[test]
    fn prefix_forcing() {
        let base = iid_strategy(0.5).unwrap();
        let forced = Outcome::parse_seq("11").unwrap();
        let f = prefix_forced_strategy(base.clone(), forced, 3).unwrap();
        assert_eq!(p1(&f, ""), 1.0);
        assert_eq!(f.forecast(&path(&base, "1")).unwrap().p1(), 1.0);
        assert_eq!(f.forecast(&path(&base, "0")).unwrap().p1(), 0.0);
        assert_eq!(f.forecast(&path(&base, "1101")).unwrap().p1(), 0.5);

        let id = prefix_forced_strategy(base.clone(), vec![], 1).unwrap();
        assert_eq!(id.forecast(&path(&base, "")).unwrap().p1(), 0.5);
        assert!(prefix_forced_strategy(base.clone(), vec![Outcome::One], 3).is_err());
        assert!(prefix_forced_strategy(base, vec![], 0).is_err());
    }

    #[test]
    fn prefix_forced_mixture_delegates_on_actual_history() {
        let (f0, _) = example_b1_pair();
        let forced = Outcome::parse_seq("11").unwrap();
        let f = prefix_forced_strategy(f0.clone(), forced, 3).unwrap();
        let h = path(&f0, "1101");
        assert_eq!(f.forecast(&h).unwrap(), f0.forecast(&h).unwrap());
        let mut c = f.cursor();
        for n in 0..=h.len() {
            assert_eq!(c.next_forecast(&h[..n]).unwrap(), f.forecast(&h[..n]).unwrap());
        }
    }

    #[test]
    fn claim1_construction() {
        let (f0, f1) = claim1_pair(0.1).unwrap();
        assert_eq!(p1(&f0, ""), 0.9);
        for h in ["1", "0", "0101", "111"] {
            assert_eq!(p1(&f0, h), 1.0);
            assert_eq!(p1(&f1, h), 1.0);
        }
        assert!(claim1_pair(0.0).is_err());
        assert!(claim1_pair(1.0).is_err());
    }

    #[test]
    fn strategies_are_pure() {
        let (m, t) = example_b1_pair();
        let h = path(&m, "1011");
        for s in [&m, &t] {
            assert_eq!(s.forecast(&h).unwrap(), s.forecast(&h).unwrap());
        }
    }
}
