use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::engine::Experiment;
use crate::harness::spec::{NatureSpec, StrategySpec};
use crate::harness::tests::TestSpec;
use crate::model::Outcome;

pub use crate::harness::spec::EventSpec;

/// Replace the first `forced.len()` outcomes by `forced` in both experts'
/// strategies (so `n = forced.len() + 1`) and compare verdicts on the
/// original and the forced triplet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgerySpec {
    pub forced: Vec<Outcome>,
}

/// A complete, serializable Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub f0: StrategySpec,
    pub f1: StrategySpec,
    pub nature: NatureSpec,
    pub horizon: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub tests: Vec<TestSpec>,
    #[serde(default)]
    pub events: Vec<EventSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surgery: Option<SurgerySpec>,
}

impl Scenario {
    pub fn new(f0: StrategySpec, f1: StrategySpec, nature: NatureSpec, horizon: usize, trials: usize) -> Self {
        Scenario {
            f0,
            f1,
            nature,
            horizon,
            trials,
            master_seed: 0,
            tests: vec![TestSpec::derivative()],
            events: Vec::new(),
            surgery: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        if self.tests.is_empty() {
            return Err(Error::param("tests", "select at least one test"));
        }
        for t in &self.tests {
            t.validate(self.horizon)?;
        }
        if let Some(s) = &self.surgery {
            if self.nature.expert_index().is_none() {
                return Err(Error::param("surgery", "requires nature of kind `expert`"));
            }
            if s.forced.len() >= self.horizon {
                return Err(Error::param("surgery", "forced prefix must be shorter than the horizon"));
            }
        }
        Ok(())
    }

    /// Validates and builds the runnable form.
    pub fn prepare(&self) -> Result<Experiment> {
        self.validate()?;
        let mut exp = Experiment::new(
            self.f0.build()?,
            self.f1.build()?,
            self.nature.build()?,
            self.horizon,
            self.trials,
            self.master_seed,
        )?;
        exp.tests = self.tests.clone();
        exp.events = self.events.clone();
        if let Some(s) = &self.surgery {
            exp = exp.with_surgery(s.forced.clone())?;
        }
        Ok(exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Expert;

    fn base() -> Scenario {
        Scenario::new(
            StrategySpec::iid(0.3),
            StrategySpec::iid(0.7),
            NatureSpec::expert(Expert::Zero),
            100,
            10,
        )
    }

    #[test]
    fn validation_rejects_bad_scenarios() {
        assert!(base().validate().is_ok());
        let mut s = base();
        s.trials = 0;
        assert!(matches!(s.validate(), Err(Error::InvalidParameter { name: "trials", .. })));
        let mut s = base();
        s.horizon = 0;
        assert!(s.validate().is_err());
        let mut s = base();
        s.tests.clear();
        assert!(s.validate().is_err());
        let mut s = base();
        s.nature = NatureSpec::External {
            strategy: StrategySpec::iid(0.5),
        };
        s.surgery = Some(SurgerySpec { forced: vec![Outcome::One] });
        assert!(s.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut s = base();
        s.events.push(EventSpec::AllOnes);
        s.surgery = Some(SurgerySpec { forced: vec![Outcome::One, Outcome::Zero] });
        let text = serde_json::to_string(&s).unwrap();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
