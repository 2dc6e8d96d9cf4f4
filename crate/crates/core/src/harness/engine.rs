//! Parallel trial runner.
//!
//! Every trial is independent: its seed is derived from the master seed and
//! the trial index, and its state lives on the worker that runs it. Records
//! are collected in index order, so the aggregate does not depend on the
//! number of workers.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::report::{
    ConditionalSummary, Disagreement, Estimate, EventSummary, RunReport, SurgerySummary,
    SurgeryTestSummary, TestSummary, VerdictCounts, VerdictDistribution,
};
use crate::harness::scenario::SurgerySpec;
use crate::harness::spec::EventSpec;
use crate::harness::tests::TestSpec;
use crate::likelihood::LikelihoodState;
use crate::model::{
    induced_prefix_probability, replay_outcomes, sample_path, Expert, Nature, Outcome, PlayPath,
};
use crate::rng::trial_seed;
use crate::strategy::{prefix_forced_strategy, StrategyRef};
use crate::verdict::Verdict;

#[derive(Debug, Clone)]
struct Surgery {
    forced: Vec<Outcome>,
    g0: StrategyRef,
    g1: StrategyRef,
}

/// A runnable experiment over built strategies.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub f0: StrategyRef,
    pub f1: StrategyRef,
    pub nature: Nature,
    pub horizon: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub tests: Vec<TestSpec>,
    pub events: Vec<EventSpec>,
    surgery: Option<Surgery>,
}

/// Per-trial outcome, in the order of the experiment's tests and events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    /// `None` marks an anomalous trial for that test.
    pub verdicts: Vec<Option<Verdict>>,
    /// Verdicts on the prefix-forced triplet, when surgery is configured.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forced_verdicts: Option<Vec<Option<Verdict>>>,
    pub log_ratio: f64,
    pub numerator_zero: bool,
    pub denominator_zero: bool,
    pub events: Vec<bool>,
    /// A strategy was undefined on the sampled path.
    pub measure_zero: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub records: Vec<TrialRecord>,
}

/// Report labels: the test kind, suffixed with `#k` when a kind repeats.
pub fn test_labels(tests: &[TestSpec]) -> Vec<String> {
    tests
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let repeats = tests.iter().filter(|u| u.kind() == t.kind()).count() > 1;
            if repeats {
                format!("{}#{k}", t.kind())
            } else {
                t.kind().to_string()
            }
        })
        .collect()
}

impl Experiment {
    /// An experiment running the derivative test only.
    pub fn new(
        f0: StrategyRef,
        f1: StrategyRef,
        nature: Nature,
        horizon: usize,
        trials: usize,
        master_seed: u64,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        if trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        Ok(Experiment {
            f0,
            f1,
            nature,
            horizon,
            trials,
            master_seed,
            tests: vec![TestSpec::derivative()],
            events: Vec::new(),
            surgery: None,
        })
    }

    pub fn with_tests(mut self, tests: Vec<TestSpec>) -> Self {
        self.tests = tests;
        self
    }

    pub fn with_events(mut self, events: Vec<EventSpec>) -> Self {
        self.events = events;
        self
    }

    /// Samples from the prefix-forced pair and evaluates every test on both
    /// the forced triplet and the original strategies replayed on the same
    /// outcomes. The prefix must have positive probability under both
    /// experts.
    pub fn with_surgery(mut self, forced: Vec<Outcome>) -> Result<Self> {
        if !matches!(self.nature, Nature::Expert(_)) {
            return Err(Error::param("surgery", "requires nature drawn from an expert"));
        }
        for e in Expert::BOTH {
            if induced_prefix_probability(&*self.f0, &*self.f1, e, &forced)? <= 0.0 {
                return Err(Error::ZeroProbabilityPrefix { expert: e.index() });
            }
        }
        let n = forced.len() + 1;
        let g0 = prefix_forced_strategy(self.f0.clone(), forced.clone(), n)?;
        let g1 = prefix_forced_strategy(self.f1.clone(), forced.clone(), n)?;
        self.surgery = Some(Surgery { forced, g0, g1 });
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.tests.is_empty() {
            return Err(Error::param("tests", "select at least one test"));
        }
        for t in &self.tests {
            t.validate(self.horizon)?;
        }
        Ok(())
    }

    fn measure_zero_record(&self, index: usize, seed: u64) -> TrialRecord {
        TrialRecord {
            index,
            seed,
            verdicts: vec![None; self.tests.len()],
            forced_verdicts: self.surgery.as_ref().map(|_| vec![None; self.tests.len()]),
            log_ratio: f64::NAN,
            numerator_zero: false,
            denominator_zero: false,
            events: vec![false; self.events.len()],
            measure_zero: true,
        }
    }

    fn evaluate_all(&self, path: &PlayPath) -> Result<Vec<Option<Verdict>>> {
        self.tests
            .iter()
            .map(|t| Ok(t.evaluate(path)?.counted()))
            .collect()
    }

    /// Paths of trial `index`: the original triplet's and, under surgery,
    /// the prefix-forced one. `None` when a strategy is undefined on the
    /// sampled path.
    pub fn trial_paths(&self, index: usize) -> Result<Option<(PlayPath, Option<PlayPath>)>> {
        let seed = trial_seed(self.master_seed, index as u64);
        let (gen0, gen1) = match &self.surgery {
            Some(s) => (&s.g0, &s.g1),
            None => (&self.f0, &self.f1),
        };
        let sampled = match sample_path(&**gen0, &**gen1, &self.nature, self.horizon, seed) {
            Ok(p) => p,
            Err(Error::MeasureZero { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if self.surgery.is_none() {
            return Ok(Some((sampled, None)));
        }
        match replay_outcomes(&*self.f0, &*self.f1, &sampled.outcomes()) {
            Ok(original) => Ok(Some((original, Some(sampled)))),
            Err(Error::MeasureZero { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Runs trial `index` alone; the same index always reproduces the
    /// same record.
    pub fn run_trial(&self, index: usize) -> Result<TrialRecord> {
        let seed = trial_seed(self.master_seed, index as u64);
        let Some((original, forced)) = self.trial_paths(index)? else {
            return Ok(self.measure_zero_record(index, seed));
        };
        let forced_verdicts = match &forced {
            Some(p) => Some(self.evaluate_all(p)?),
            None => None,
        };
        let outcomes = original.outcomes();
        let lik = LikelihoodState::from_path(&original, 0);
        Ok(TrialRecord {
            index,
            seed,
            verdicts: self.evaluate_all(&original)?,
            forced_verdicts,
            log_ratio: lik.log_ratio,
            numerator_zero: lik.numerator_zero,
            denominator_zero: lik.denominator_zero,
            events: self.events.iter().map(|e| e.contains(&outcomes)).collect(),
            measure_zero: false,
        })
    }

    /// Runs all trials. `workers` caps the thread count; the default uses
    /// the global rayon pool. Results do not depend on `workers`.
    pub fn run(&self, workers: Option<usize>) -> Result<RunOutput> {
        self.validate()?;
        let start = Instant::now();
        let collect = || -> Result<Vec<TrialRecord>> {
            (0..self.trials)
                .into_par_iter()
                .map(|i| self.run_trial(i))
                .collect()
        };
        let records = match workers {
            Some(0) => return Err(Error::param("workers", "must be at least 1")),
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::param("workers", e.to_string()))?
                .install(collect)?,
            None => collect()?,
        };
        let mut report = self.aggregate(&records);
        report.wall_time_secs = start.elapsed().as_secs_f64();
        Ok(RunOutput { report, records })
    }

    fn aggregate(&self, records: &[TrialRecord]) -> RunReport {
        let labels = test_labels(&self.tests);
        let n_tests = self.tests.len();
        let trials = records.len();

        let mut counts = vec![VerdictCounts::default(); n_tests];
        let mut hits = vec![0usize; self.events.len()];
        let mut conditional = vec![vec![VerdictCounts::default(); n_tests]; self.events.len()];
        let mut pair_disagree = vec![vec![0usize; n_tests]; n_tests];
        let mut forced_counts = vec![VerdictCounts::default(); n_tests];
        let mut surgery_disagree = vec![0usize; n_tests];

        for r in records {
            for (k, v) in r.verdicts.iter().enumerate() {
                counts[k].record(*v);
                for b in (k + 1)..n_tests {
                    if *v != r.verdicts[b] {
                        pair_disagree[k][b] += 1;
                    }
                }
            }
            for (e, &inside) in r.events.iter().enumerate() {
                if inside {
                    hits[e] += 1;
                    for (k, v) in r.verdicts.iter().enumerate() {
                        conditional[e][k].record(*v);
                    }
                }
            }
            if let Some(fv) = &r.forced_verdicts {
                for (k, v) in fv.iter().enumerate() {
                    forced_counts[k].record(*v);
                    if *v != r.verdicts[k] {
                        surgery_disagree[k] += 1;
                    }
                }
            }
        }

        let tests = self
            .tests
            .iter()
            .zip(&labels)
            .zip(&counts)
            .map(|((spec, label), c)| TestSummary {
                label: label.clone(),
                spec: spec.clone(),
                distribution: VerdictDistribution::from_counts(*c),
            })
            .collect();

        let events = self
            .events
            .iter()
            .enumerate()
            .map(|(e, spec)| EventSummary {
                event: spec.clone(),
                probability: Estimate::new(hits[e], trials),
                conditional: labels
                    .iter()
                    .zip(&conditional[e])
                    .map(|(label, c)| ConditionalSummary {
                        label: label.clone(),
                        distribution: VerdictDistribution::from_counts(*c),
                    })
                    .collect(),
            })
            .collect();

        let mut disagreements = Vec::new();
        for a in 0..n_tests {
            for b in (a + 1)..n_tests {
                disagreements.push(Disagreement {
                    a: labels[a].clone(),
                    b: labels[b].clone(),
                    frequency: Estimate::new(pair_disagree[a][b], trials),
                });
            }
        }

        let surgery = self.surgery.as_ref().map(|s| SurgerySummary {
            surgery: SurgerySpec {
                forced: s.forced.clone(),
            },
            tests: labels
                .iter()
                .enumerate()
                .map(|(k, label)| SurgeryTestSummary {
                    label: label.clone(),
                    disagreement: Estimate::new(surgery_disagree[k], trials),
                    forced_distribution: VerdictDistribution::from_counts(forced_counts[k]),
                })
                .collect(),
        });

        RunReport {
            scenario: None,
            trials,
            measure_zero_trials: records.iter().filter(|r| r.measure_zero).count(),
            tests,
            events,
            disagreements,
            surgery,
            wall_time_secs: 0.0,
        }
    }
}

impl crate::harness::scenario::Scenario {
    /// Validates, runs and echoes the scenario into the report.
    pub fn run(&self, workers: Option<usize>) -> Result<RunOutput> {
        let mut out = self.prepare()?.run(workers)?;
        out.report.scenario = Some(self.clone());
        Ok(out)
    }
}
