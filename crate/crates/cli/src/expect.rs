//! Analytic expectations attached to scenario files and checked against a
//! finished run.

use std::fmt;

use fcmp_core::harness::{test_labels, Estimate, RunReport};
use fcmp_core::Verdict;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::file::ScenarioFile;

/// A verdict written by name (`expert0`, `inconclusive`, `expert1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VerdictName(pub Verdict);

impl TryFrom<String> for VerdictName {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        Verdict::from_label(&s)
            .map(VerdictName)
            .ok_or_else(|| format!("unknown verdict `{s}`; expected expert0, inconclusive or expert1"))
    }
}

impl From<VerdictName> for String {
    fn from(v: VerdictName) -> String {
        v.0.label().to_string()
    }
}

/// What an expectation measures. Tests are referenced by report label and
/// events by their position in `events`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Metric {
    Verdict { test: String, verdict: VerdictName },
    /// Verdict frequency among trials inside event `event`.
    Conditional { event: usize, test: String, verdict: VerdictName },
    EventProbability { event: usize },
    Disagreement { a: String, b: String },
    SurgeryDisagreement { test: String },
}

/// `value ± tol`, and/or `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    /// Where the expected value comes from.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationResult {
    pub description: String,
    pub estimate: Option<Estimate>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Verdict { test, verdict } => write!(f, "P({test} = {})", verdict.0),
            Metric::Conditional { event, test, verdict } => {
                write!(f, "P({test} = {} | event {event})", verdict.0)
            }
            Metric::EventProbability { event } => write!(f, "P(event {event})"),
            Metric::Disagreement { a, b } => write!(f, "P({a} != {b})"),
            Metric::SurgeryDisagreement { test } => write!(f, "P({test} changes under surgery)"),
        }
    }
}

impl Expectation {
    pub fn validate(&self, file: &ScenarioFile) -> Result<(), CliError> {
        let labels = test_labels(&file.tests);
        let known = |t: &String| -> Result<(), CliError> {
            if labels.contains(t) {
                Ok(())
            } else {
                Err(CliError::Invalid(format!(
                    "expectation refers to test `{t}`; known tests: {}",
                    labels.join(", ")
                )))
            }
        };
        let event = |e: usize| -> Result<(), CliError> {
            if e < file.events.len() {
                Ok(())
            } else {
                Err(CliError::Invalid(format!(
                    "expectation refers to event {e} but {} are defined",
                    file.events.len()
                )))
            }
        };
        match &self.metric {
            Metric::Verdict { test, .. } => known(test)?,
            Metric::Conditional { event: e, test, .. } => {
                event(*e)?;
                known(test)?
            }
            Metric::EventProbability { event: e } => event(*e)?,
            Metric::Disagreement { a, b } => {
                known(a)?;
                known(b)?
            }
            Metric::SurgeryDisagreement { test } => {
                known(test)?;
                if file.surgery.is_none() {
                    return Err(CliError::Invalid("surgery expectation without [surgery]".into()));
                }
            }
        }
        if self.value.is_none() && self.min.is_none() && self.max.is_none() {
            return Err(CliError::Invalid(format!("expectation on {} sets no bound", self.metric)));
        }
        if self.tol.is_some() && self.value.is_none() {
            return Err(CliError::Invalid(format!("expectation on {} has tol without value", self.metric)));
        }
        Ok(())
    }

    fn bounds(&self) -> String {
        let mut parts = Vec::new();
        if let Some(v) = self.value {
            parts.push(match self.tol {
                Some(t) if t > 0.0 => format!("= {v} ± {t}"),
                _ => format!("= {v}"),
            });
        }
        if let Some(m) = self.min {
            parts.push(format!(">= {m}"));
        }
        if let Some(m) = self.max {
            parts.push(format!("<= {m}"));
        }
        parts.join(", ")
    }

    /// Whether `x` satisfies every bound. Tolerances absorb float noise of
    /// a few ulps so exact analytic values like `1` compare cleanly.
    pub fn admits(&self, x: f64) -> bool {
        let eps = 1e-12;
        self.value
            .is_none_or(|v| (x - v).abs() <= self.tol.unwrap_or(0.0) + eps)
            && self.min.is_none_or(|m| x >= m - eps)
            && self.max.is_none_or(|m| x <= m + eps)
    }

    fn estimate(&self, report: &RunReport) -> Option<Estimate> {
        match &self.metric {
            Metric::Verdict { test, verdict } => {
                report.test(test).map(|t| *t.distribution.estimate(verdict.0))
            }
            Metric::Conditional { event, test, verdict } => report
                .events
                .get(*event)?
                .conditional
                .iter()
                .find(|c| &c.label == test)
                .map(|c| *c.distribution.estimate(verdict.0)),
            Metric::EventProbability { event } => report.events.get(*event).map(|e| e.probability),
            Metric::Disagreement { a, b } => report.disagreement(a, b).map(|d| d.frequency),
            Metric::SurgeryDisagreement { test } => report
                .surgery
                .as_ref()?
                .tests
                .iter()
                .find(|t| &t.label == test)
                .map(|t| t.disagreement),
        }
    }

    pub fn check(&self, report: &RunReport) -> ExpectationResult {
        // an unobserved conditioning event cannot confirm anything
        let estimate = self.estimate(report).filter(|e| e.n > 0);
        ExpectationResult {
            description: format!("{} {}", self.metric, self.bounds()),
            passed: estimate.is_some_and(|e| self.admits(e.value())),
            estimate,
            note: self.note.clone(),
        }
    }
}
