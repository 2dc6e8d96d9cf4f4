//! Property checks for comparison tests, each estimated by Monte Carlo.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::engine::{Experiment, RunOutput};
use crate::harness::report::{Estimate, SurgeryTestSummary, VerdictDistribution};
use crate::harness::spec::EventSpec;
use crate::harness::tests::TestSpec;
use crate::model::{Expert, HistoryEntry, Nature, Outcome};
use crate::strategy::{absolutely_continuous_pair, iid_strategy, StrategyRef};
use crate::verdict::Verdict;

/// Shared Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn new(horizon: usize, trials: usize, seed: u64) -> Self {
        McConfig {
            horizon,
            trials,
            seed,
            workers: None,
        }
    }
}

fn run(
    tests: Vec<TestSpec>,
    events: Vec<EventSpec>,
    f0: &StrategyRef,
    f1: &StrategyRef,
    nature: Nature,
    cfg: McConfig,
) -> Result<RunOutput> {
    Experiment::new(f0.clone(), f1.clone(), nature, cfg.horizon, cfg.trials, cfg.seed)?
        .with_tests(tests)
        .with_events(events)
        .run(cfg.workers)
}

/// Distribution of `test`'s verdict under `nature`.
pub fn estimate_verdict_distribution(
    test: &TestSpec,
    f0: &StrategyRef,
    f1: &StrategyRef,
    nature: Nature,
    cfg: McConfig,
) -> Result<VerdictDistribution> {
    let out = run(vec![test.clone()], Vec::new(), f0, f1, nature, cfg)?;
    Ok(out.report.tests[0].distribution.clone())
}

/// Frequency of rejecting the expert whose measure generated the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorFreeReport {
    /// Indexed by the true expert.
    pub wrong: [Estimate; 2],
    /// `e^{-lambda}` for the derivative test, which bounds the error by
    /// Ville's inequality. `None` for tests without such a bound.
    pub analytic_bound: Option<f64>,
    /// The analytic bound plus three Monte Carlo standard errors.
    pub mc_bound: Option<f64>,
}

impl ErrorFreeReport {
    /// Both error frequencies are within the Monte Carlo bound.
    pub fn within_bound(&self) -> Option<bool> {
        self.mc_bound
            .map(|b| self.wrong.iter().all(|w| w.value() <= b))
    }
}

pub fn check_error_free(
    test: &TestSpec,
    f0: &StrategyRef,
    f1: &StrategyRef,
    cfg: McConfig,
) -> Result<ErrorFreeReport> {
    let mut wrong = [Estimate::new(0, 0); 2];
    for e in Expert::BOTH {
        let d = estimate_verdict_distribution(test, f0, f1, Nature::Expert(e), cfg)?;
        let rejected = Verdict::from(e.other());
        wrong[e.index()] = Estimate::new(d.counts.get(rejected), d.counts.total());
    }
    let analytic_bound = match test {
        TestSpec::Derivative { lambda, .. } => Some((-lambda).exp()),
        _ => None,
    };
    let mc_bound = analytic_bound.map(|b| b + 3.0 * (b / cfg.trials as f64).sqrt());
    Ok(ErrorFreeReport {
        wrong,
        analytic_bound,
        mc_bound,
    })
}

/// Behaviour of a test on an event `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasonableReport {
    pub event_probability: Estimate,
    /// Verdict distribution given `A`.
    pub conditional: VerdictDistribution,
    /// `A` never occurred, so the conditional distribution is empty.
    pub unobserved: bool,
}

impl ReasonableReport {
    /// Estimated `P(A and T = v)`.
    pub fn joint(&self, v: Verdict) -> Estimate {
        Estimate::new(self.conditional.counts.get(v), self.event_probability.n)
    }
}

pub fn check_reasonable(
    test: &TestSpec,
    f0: &StrategyRef,
    f1: &StrategyRef,
    event: &EventSpec,
    nature: Nature,
    cfg: McConfig,
) -> Result<ReasonableReport> {
    let out = run(vec![test.clone()], vec![event.clone()], f0, f1, nature, cfg)?;
    let ev = &out.report.events[0];
    Ok(ReasonableReport {
        event_probability: ev.probability,
        conditional: ev.conditional[0].distribution.clone(),
        unobserved: ev.probability.count == 0,
    })
}

/// Whether swapping the experts' forecasts complements the verdict on
/// `path`. Anomalous evaluations must stay anomalous.
pub fn check_anonymity(test: &TestSpec, path: &[HistoryEntry]) -> Result<bool> {
    let direct = test.evaluate(path)?;
    let swapped: Vec<HistoryEntry> = path.iter().map(HistoryEntry::swapped).collect();
    let mirrored = test.evaluate(&swapped)?;
    Ok(direct.anomalous == mirrored.anomalous
        && (direct.anomalous || direct.verdict.complement() == mirrored.verdict))
}

/// Disagreement between verdicts on the original and prefix-forced
/// triplets, sampling from the forced pair.
pub fn check_tail(
    test: &TestSpec,
    f0: &StrategyRef,
    f1: &StrategyRef,
    forced: &[Outcome],
    nature: Expert,
    cfg: McConfig,
) -> Result<SurgeryTestSummary> {
    let out = Experiment::new(f0.clone(), f1.clone(), Nature::Expert(nature), cfg.horizon, cfg.trials, cfg.seed)?
        .with_tests(vec![test.clone()])
        .with_surgery(forced.to_vec())?
        .run(cfg.workers)?;
    let surgery = out.report.surgery.expect("surgery was configured");
    Ok(surgery.tests.into_iter().next().expect("one test"))
}

/// Frequency with which `test` names the true expert when both forecast
/// IID with distinct probabilities and nature follows `truth`.
pub fn check_ideal_iid(test: &TestSpec, p0: f64, p1: f64, truth: Expert, cfg: McConfig) -> Result<Estimate> {
    if p0 == p1 {
        return Err(Error::param("p1", "the IID probabilities must differ"));
    }
    let d = estimate_verdict_distribution(
        test,
        &iid_strategy(p0)?,
        &iid_strategy(p1)?,
        Nature::Expert(truth),
        cfg,
    )?;
    Ok(*d.estimate(Verdict::from(truth)))
}

/// Fraction of trials on which `a` and `b` disagree, under each nature.
pub fn check_equivalence(
    a: &TestSpec,
    b: &TestSpec,
    f0: &StrategyRef,
    f1: &StrategyRef,
    natures: &[Nature],
    cfg: McConfig,
) -> Result<Vec<Estimate>> {
    natures
        .iter()
        .map(|nature| {
            let out = run(vec![a.clone(), b.clone()], Vec::new(), f0, f1, nature.clone(), cfg)?;
            Ok(out.report.disagreements[0].frequency)
        })
        .collect()
}

/// Derivative-test verdicts on the mutually absolutely continuous pair
/// (mixture of IID 1/2 and 3/10 against IID 1/2), indexed by nature.
pub fn check_inconclusive_under_absolute_continuity(cfg: McConfig) -> Result<[VerdictDistribution; 2]> {
    let (f0, f1) = absolutely_continuous_pair();
    let test = TestSpec::derivative();
    Ok([
        estimate_verdict_distribution(&test, &f0, &f1, Nature::Expert(Expert::Zero), cfg)?,
        estimate_verdict_distribution(&test, &f0, &f1, Nature::Expert(Expert::One), cfg)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::replay_outcomes;

    #[test]
    fn derivative_is_error_free_on_iid_pair() {
        let f0 = iid_strategy(0.4).unwrap();
        let f1 = iid_strategy(0.6).unwrap();
        let r = check_error_free(&TestSpec::derivative(), &f0, &f1, McConfig::new(200, 500, 3)).unwrap();
        assert_eq!(r.within_bound(), Some(true), "{r:?}");
        assert!((r.analytic_bound.unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn anonymity_on_fixed_path() {
        let f0 = iid_strategy(0.2).unwrap();
        let f1 = iid_strategy(0.9).unwrap();
        let path = replay_outcomes(&*f0, &*f1, &Outcome::parse_seq("1101111011111111").unwrap()).unwrap();
        for t in [TestSpec::derivative(), TestSpec::likelihood_ratio(), TestSpec::cross_calibration()] {
            assert!(check_anonymity(&t, &path).unwrap(), "{}", t.kind());
        }
    }

    #[test]
    fn ideal_iid_rejects_equal_probabilities() {
        let cfg = McConfig::new(10, 10, 0);
        assert!(check_ideal_iid(&TestSpec::derivative(), 0.5, 0.5, Expert::Zero, cfg).is_err());
        let e = check_ideal_iid(&TestSpec::derivative(), 0.3, 0.7, Expert::One, McConfig::new(300, 200, 1)).unwrap();
        assert!(e.value() >= 0.99, "{e:?}");
    }

    #[test]
    fn reasonable_reports_unobserved_events() {
        let f = iid_strategy(1.0).unwrap();
        let ev = EventSpec::Prefix {
            outcomes: vec![Outcome::Zero],
        };
        let r = check_reasonable(&TestSpec::derivative(), &f, &f, &ev, Nature::Expert(Expert::Zero), McConfig::new(5, 20, 0))
            .unwrap();
        assert!(r.unobserved);
        assert_eq!(r.joint(Verdict::Expert0).value(), 0.0);
    }

    #[test]
    fn tail_surgery_on_iid_pair_never_changes_derivative() {
        let f0 = iid_strategy(0.3).unwrap();
        let f1 = iid_strategy(0.7).unwrap();
        let s = check_tail(
            &TestSpec::derivative(),
            &f0,
            &f1,
            &Outcome::parse_seq("111").unwrap(),
            Expert::Zero,
            // long enough for the drift to dwarf the prefix's contribution
            McConfig::new(1000, 200, 5),
        )
        .unwrap();
        assert_eq!(s.disagreement.count, 0);
    }
}
