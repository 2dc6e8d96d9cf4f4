//! Scenario files, bundled presets and report writing for the `fcmp`
//! binary.

mod error;
pub mod expect;
pub mod file;
pub mod output;
pub mod presets;
pub mod run;

pub use error::CliError;
pub use file::{OutputSpec, ScenarioFile};
pub use output::ReportDocument;
