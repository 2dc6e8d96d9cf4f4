//! Declarative, serializable descriptions of strategies and nature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Expert, Nature, Outcome};
use crate::strategy::{
    claim1_pair, day_one_strategy, dirac_strategy, iid_strategy, mixture_strategy,
    prefix_forced_strategy, time_varying_strategy, DiracTarget, StrategyRef,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySpec {
    Iid {
        p: f64,
    },
    /// `prefix` followed by `tail` forever, predicted with certainty.
    Dirac {
        #[serde(default)]
        prefix: Vec<Outcome>,
        tail: Outcome,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
    TimeVarying {
        schedule: ScheduleSpec,
    },
    /// `first` in period 1, then `then`.
    DayOne {
        first: f64,
        then: Box<StrategySpec>,
    },
    /// `1 - epsilon` in period 1, certainty of a one afterwards.
    Claim1 {
        epsilon: f64,
    },
    PrefixForced {
        base: Box<StrategySpec>,
        forced: Vec<Outcome>,
        n: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub strategy: StrategySpec,
}

/// Period-indexed schedules (`t` is 1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    /// `1 - 1/(t + offset)`.
    OneMinusInverse { offset: f64 },
    Constant { p: f64 },
    /// `values[t-1]`, repeating the last value after the end.
    Table { values: Vec<f64> },
}

impl StrategySpec {
    pub fn iid(p: f64) -> Self {
        StrategySpec::Iid { p }
    }

    pub fn all_ones() -> Self {
        StrategySpec::Dirac {
            prefix: Vec::new(),
            tail: Outcome::One,
        }
    }

    pub fn build(&self) -> Result<StrategyRef> {
        match self {
            StrategySpec::Iid { p } => iid_strategy(*p),
            StrategySpec::Dirac { prefix, tail } => {
                Ok(dirac_strategy(DiracTarget::new(prefix.clone(), *tail)))
            }
            StrategySpec::Mixture { components } => mixture_strategy(
                components
                    .iter()
                    .map(|c| Ok((c.weight, c.strategy.build()?)))
                    .collect::<Result<_>>()?,
            ),
            StrategySpec::TimeVarying { schedule } => schedule.build(),
            StrategySpec::DayOne { first, then } => day_one_strategy(*first, then.build()?),
            StrategySpec::Claim1 { epsilon } => Ok(claim1_pair(*epsilon)?.0),
            StrategySpec::PrefixForced { base, forced, n } => {
                prefix_forced_strategy(base.build()?, forced.clone(), *n)
            }
        }
    }
}

impl ScheduleSpec {
    fn build(&self) -> Result<StrategyRef> {
        match self {
            ScheduleSpec::OneMinusInverse { offset } => {
                let offset = *offset;
                if !(offset >= 1.0 && offset.is_finite()) {
                    return Err(Error::param("offset", format!("{offset} must be at least 1")));
                }
                Ok(time_varying_strategy(move |t| 1.0 - 1.0 / (t as f64 + offset)))
            }
            ScheduleSpec::Constant { p } => {
                let p = *p;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::param("p", format!("{p} is not a probability")));
                }
                Ok(time_varying_strategy(move |_| p))
            }
            ScheduleSpec::Table { values } => {
                if values.is_empty() {
                    return Err(Error::param("values", "schedule table is empty"));
                }
                if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(Error::param("values", format!("{v} is not a probability")));
                }
                let values = values.clone();
                Ok(time_varying_strategy(move |t| {
                    values[(t - 1).min(values.len() - 1)]
                }))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NatureSpec {
    /// Outcomes drawn from expert `index`'s induced measure.
    Expert { index: Expert },
    External { strategy: StrategySpec },
}

impl NatureSpec {
    pub fn expert(e: Expert) -> Self {
        NatureSpec::Expert { index: e }
    }

    pub fn build(&self) -> Result<Nature> {
        Ok(match self {
            NatureSpec::Expert { index } => Nature::Expert(*index),
            NatureSpec::External { strategy } => Nature::External(strategy.build()?),
        })
    }

    pub fn expert_index(&self) -> Option<Expert> {
        match self {
            NatureSpec::Expert { index } => Some(*index),
            NatureSpec::External { .. } => None,
        }
    }
}

/// Events whose membership is decided from the realized finite path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventSpec {
    /// Paths starting with `outcomes`.
    Prefix { outcomes: Vec<Outcome> },
    /// The all-ones path, checked on the realized horizon.
    AllOnes,
}

impl EventSpec {
    pub fn contains(&self, outcomes: &[Outcome]) -> bool {
        match self {
            EventSpec::Prefix { outcomes: prefix } => outcomes.starts_with(prefix),
            EventSpec::AllOnes => outcomes.iter().all(|o| o.is_one()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EventSpec::Prefix { outcomes } => {
                let s: String = outcomes.iter().map(|o| o.to_string()).collect();
                format!("prefix({s})")
            }
            EventSpec::AllOnes => "all_ones".to_string(),
        }
    }
}
