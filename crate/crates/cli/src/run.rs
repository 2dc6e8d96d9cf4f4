use std::fs;
use std::path::{Path, PathBuf};

use fcmp_core::harness::RunOutput;

use crate::error::CliError;
use crate::expect::ExpectationResult;
use crate::file::ScenarioFile;
use crate::presets;

/// Loads `target`, a scenario file path or a preset name, with overrides.
pub fn load(target: &str, overrides: &[String]) -> Result<ScenarioFile, CliError> {
    let path = Path::new(target);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        return ScenarioFile::parse(&text, target, overrides);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(target);
    if presets::source(target).is_some() {
        presets::load(target, overrides)
    } else if target.ends_with(".scenario") && presets::source(stem).is_some() {
        // `presets/claim1.scenario` works from any directory
        presets::load(stem, overrides)
    } else {
        Err(CliError::UnknownScenario(target.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct Completed {
    pub output: RunOutput,
    pub expectations: Vec<ExpectationResult>,
}

impl Completed {
    pub fn expectations_met(&self) -> bool {
        self.expectations.iter().all(|e| e.passed)
    }
}

/// Runs the scenario and checks its expectations.
pub fn execute(file: &ScenarioFile, workers: Option<usize>) -> Result<Completed, CliError> {
    let output = file.scenario().run(workers)?;
    let expectations = file.expect.iter().map(|e| e.check(&output.report)).collect();
    Ok(Completed { output, expectations })
}

/// `--out`, else `output.dir`, else `fcmp-out/<name>`.
pub fn output_dir(file: &ScenarioFile, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .or_else(|| file.output.dir.clone())
        .unwrap_or_else(|| Path::new("fcmp-out").join(&file.name))
}
