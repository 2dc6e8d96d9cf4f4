//! Scenario files bundled into the binary.

use crate::error::CliError;
use crate::file::ScenarioFile;

/// `(name, source)`, sorted by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("claim1", include_str!("../../../presets/claim1.scenario")),
    ("claim2", include_str!("../../../presets/claim2.scenario")),
    ("equivalence-d-vs-l", include_str!("../../../presets/equivalence-d-vs-l.scenario")),
    ("exampleB1", include_str!("../../../presets/exampleB1.scenario")),
    ("ideal-iid", include_str!("../../../presets/ideal-iid.scenario")),
    ("prop1-absolute-continuity", include_str!("../../../presets/prop1-absolute-continuity.scenario")),
    ("tail-surgery", include_str!("../../../presets/tail-surgery.scenario")),
];

pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str, overrides: &[String]) -> Result<ScenarioFile, CliError> {
    let text = source(name).ok_or_else(|| CliError::UnknownScenario(name.to_string()))?;
    ScenarioFile::parse(text, &format!("preset {name}"), overrides)
}

/// Every preset, parsed, in name order.
pub fn all() -> Result<Vec<ScenarioFile>, CliError> {
    PRESETS.iter().map(|(name, _)| load(name, &[])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_are_sorted() {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        for f in all().unwrap() {
            assert!(PRESETS.iter().any(|p| p.0 == f.name), "{} is registered under another name", f.name);
            assert!(!f.anchor.is_empty() && !f.description.is_empty(), "{}", f.name);
            assert!(!f.expect.is_empty(), "{} has no expectations", f.name);
        }
    }
}
