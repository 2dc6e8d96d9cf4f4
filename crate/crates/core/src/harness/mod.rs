//! Monte Carlo experiments: scenario description, the parallel trial
//! runner, aggregation and property checks.

pub mod checks;
mod engine;
mod report;
mod scenario;
mod spec;

pub use engine::{test_labels, Experiment, RunOutput, TrialRecord};
pub use report::{
    wilson_interval, ConditionalSummary, Disagreement, Estimate, EventSummary, RunReport,
    SurgerySummary, SurgeryTestSummary, TestSummary, VerdictCounts, VerdictDistribution,
};
pub use scenario::{Scenario, SurgerySpec};
pub use spec::{EventSpec, MixtureComponent, NatureSpec, ScheduleSpec, StrategySpec};
pub use tests::{ideal_iid_verdict, Evaluation, TestSpec};
