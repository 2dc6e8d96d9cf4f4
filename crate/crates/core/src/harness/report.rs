use serde::{Deserialize, Serialize};

use crate::harness::scenario::{EventSpec, Scenario, SurgerySpec};
use crate::harness::tests::TestSpec;
use crate::verdict::Verdict;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `count` successes out of `n`.
/// Returns `(0, 1)` when `n = 0`.
pub fn wilson_interval(count: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = count as f64 / n_f;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = Z95 * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// A binomial proportion with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub count: usize,
    pub n: usize,
    /// `None` when `n = 0`.
    pub frequency: Option<f64>,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    pub fn new(count: usize, n: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(count, n);
        Estimate {
            count,
            n,
            frequency: (n > 0).then(|| count as f64 / n as f64),
            ci_low,
            ci_high,
        }
    }

    /// Frequency, or 0 when nothing was observed.
    pub fn value(&self) -> f64 {
        self.frequency.unwrap_or(0.0)
    }

    /// Monte Carlo standard error `sqrt(p (1 - p) / n)`.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        let p = self.value();
        (p * (1.0 - p) / self.n as f64).sqrt()
    }
}

/// Counts of each verdict plus anomalous trials (impossible under both
/// experts, or a strategy undefined on the path).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub expert0: usize,
    pub inconclusive: usize,
    pub expert1: usize,
    pub anomalies: usize,
}

impl VerdictCounts {
    pub fn record(&mut self, v: Option<Verdict>) {
        match v {
            Some(Verdict::Expert0) => self.expert0 += 1,
            Some(Verdict::Inconclusive) => self.inconclusive += 1,
            Some(Verdict::Expert1) => self.expert1 += 1,
            None => self.anomalies += 1,
        }
    }

    pub fn get(&self, v: Verdict) -> usize {
        match v {
            Verdict::Expert0 => self.expert0,
            Verdict::Inconclusive => self.inconclusive,
            Verdict::Expert1 => self.expert1,
        }
    }

    /// Everything recorded, anomalies included.
    pub fn total(&self) -> usize {
        self.expert0 + self.inconclusive + self.expert1 + self.anomalies
    }
}

/// Verdict counts with frequencies over all recorded trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDistribution {
    pub counts: VerdictCounts,
    pub expert0: Estimate,
    pub inconclusive: Estimate,
    pub expert1: Estimate,
}

impl VerdictDistribution {
    pub fn from_counts(counts: VerdictCounts) -> Self {
        let n = counts.total();
        VerdictDistribution {
            counts,
            expert0: Estimate::new(counts.expert0, n),
            inconclusive: Estimate::new(counts.inconclusive, n),
            expert1: Estimate::new(counts.expert1, n),
        }
    }

    pub fn estimate(&self, v: Verdict) -> &Estimate {
        match v {
            Verdict::Expert0 => &self.expert0,
            Verdict::Inconclusive => &self.inconclusive,
            Verdict::Expert1 => &self.expert1,
        }
    }

    /// Frequency of `v` (0 when empty).
    pub fn frequency(&self, v: Verdict) -> f64 {
        self.estimate(v).value()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSummary {
    pub label: String,
    pub spec: TestSpec,
    pub distribution: VerdictDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSummary {
    pub label: String,
    pub distribution: VerdictDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSummary {
    pub event: EventSpec,
    pub probability: Estimate,
    /// Verdict distribution of each test restricted to trials in the event.
    pub conditional: Vec<ConditionalSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub a: String,
    pub b: String,
    pub frequency: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgeryTestSummary {
    pub label: String,
    /// Trials where the verdict on the original triplet differs from the
    /// verdict on the prefix-forced triplet.
    pub disagreement: Estimate,
    pub forced_distribution: VerdictDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgerySummary {
    pub surgery: SurgerySpec,
    pub tests: Vec<SurgeryTestSummary>,
}

/// Aggregated result of a scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Present when the run was built from a serializable [`Scenario`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    pub trials: usize,
    /// Trials on which a strategy was undefined (mixture measure zero).
    pub measure_zero_trials: usize,
    pub tests: Vec<TestSummary>,
    pub events: Vec<EventSummary>,
    pub disagreements: Vec<Disagreement>,
    pub surgery: Option<SurgerySummary>,
    pub wall_time_secs: f64,
}

impl RunReport {
    pub fn test(&self, label: &str) -> Option<&TestSummary> {
        self.tests.iter().find(|t| t.label == label)
    }

    pub fn event(&self, event: &EventSpec) -> Option<&EventSummary> {
        self.events.iter().find(|e| &e.event == event)
    }

    pub fn disagreement(&self, a: &str, b: &str) -> Option<&Disagreement> {
        self.disagreements
            .iter()
            .find(|d| (d.a == a && d.b == b) || (d.a == b && d.b == a))
    }

    /// Verdict counts of every test, for reproducibility comparisons.
    pub fn counts(&self) -> Vec<VerdictCounts> {
        self.tests.iter().map(|t| t.distribution.counts).collect()
    }
}
