//! Report files and the terminal summary.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use fcmp_core::crosscal::{write_profiles_csv, CrossCalibState};
use fcmp_core::harness::{test_labels, Estimate, RunOutput, RunReport, TestSpec, TrialRecord, VerdictDistribution};
use fcmp_core::likelihood::{trajectory, write_trajectory_csv};
use fcmp_core::Verdict;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::expect::ExpectationResult;
use crate::file::ScenarioFile;

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    /// The scenario file after overrides; re-running it reproduces the run.
    pub scenario_file: ScenarioFile,
    pub report: RunReport,
    pub expectations: Vec<ExpectationResult>,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn trial_line(record: &TrialRecord, labels: &[String], file: &ScenarioFile) -> Value {
    let verdicts = |vs: &[Option<Verdict>]| -> Value {
        let m: Map<String, Value> = labels
            .iter()
            .zip(vs)
            .map(|(l, v)| (l.clone(), v.map_or(Value::Null, |v| json!(v.value()))))
            .collect();
        Value::Object(m)
    };
    let mut line = json!({
        "index": record.index,
        "seed": record.seed,
        "verdicts": verdicts(&record.verdicts),
        "log_ratio": record.log_ratio,
        "numerator_zero": record.numerator_zero,
        "denominator_zero": record.denominator_zero,
        "events": file.events.iter().zip(&record.events)
            .map(|(e, &hit)| (e.label(), Value::Bool(hit)))
            .collect::<Map<String, Value>>(),
        "measure_zero": record.measure_zero,
    });
    if let Some(fv) = &record.forced_verdicts {
        line["forced_verdicts"] = verdicts(fv);
    }
    line
}

/// Writes `report.json` and the exports the file asks for into `dir`.
pub fn write_outputs(
    dir: &Path,
    file: &ScenarioFile,
    output: &RunOutput,
    expectations: &[ExpectationResult],
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let doc = ReportDocument {
        scenario_file: file.clone(),
        report: output.report.clone(),
        expectations: expectations.to_vec(),
    };
    let path = dir.join("report.json");
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))?;

    if file.output.trials_jsonl {
        let labels = test_labels(&file.tests);
        let path = dir.join("trials.jsonl");
        let mut w = create(&path)?;
        for r in &output.records {
            serde_json::to_writer(&mut w, &trial_line(r, &labels, file))?;
            writeln!(w).map_err(|e| CliError::io(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
    }

    if file.output.trajectory || file.output.crosscal_profiles {
        let exp = file.scenario().prepare()?;
        match exp.trial_paths(file.output.export_trial)? {
            None => eprintln!(
                "note: trial {} has measure zero under a mixture; no path exports written",
                file.output.export_trial
            ),
            Some((path, _)) => {
                if file.output.trajectory {
                    let out = dir.join("trajectory.csv");
                    let mut w = create(&out)?;
                    write_trajectory_csv(&mut w, &trajectory(&path))
                        .and_then(|_| w.flush())
                        .map_err(|e| CliError::io(&out, e))?;
                }
                if file.output.crosscal_profiles {
                    let n = file
                        .tests
                        .iter()
                        .find_map(|t| match t {
                            TestSpec::CrossCalibration { n, .. } => Some(*n),
                            _ => None,
                        })
                        .unwrap_or(5);
                    let state = CrossCalibState::from_path(&path, n)?;
                    let out = dir.join("crosscal_profiles.csv");
                    let mut w = create(&out)?;
                    write_profiles_csv(&mut w, &state)
                        .and_then(|_| w.flush())
                        .map_err(|e| CliError::io(&out, e))?;
                }
            }
        }
    }
    Ok(())
}

fn ci(e: &Estimate) -> String {
    format!("[{:.4}, {:.4}]", e.ci_low, e.ci_high)
}

fn frequency(e: &Estimate) -> String {
    e.frequency.map_or_else(|| "-".to_string(), |f| format!("{f:.4}"))
}

fn distribution_rows(out: &mut String, d: &VerdictDistribution) {
    for v in Verdict::ALL {
        let e = d.estimate(v);
        let _ = writeln!(out, "  {:<14}{:>9}  {:>8}  {}", v.label(), e.count, frequency(e), ci(e));
    }
    if d.counts.anomalies > 0 {
        let _ = writeln!(out, "  {:<14}{:>9}", "anomalous", d.counts.anomalies);
    }
}

/// One-screen summary: verdict counts, frequencies and 95% intervals.
pub fn summary(file: &ScenarioFile, output: &RunOutput, expectations: &[ExpectationResult]) -> String {
    let r = &output.report;
    let mut out = String::new();
    let _ = writeln!(out, "{} ({})", file.name, file.anchor);
    let _ = writeln!(
        out,
        "horizon {}  trials {}  seed {}  wall {:.2}s",
        file.horizon, r.trials, file.seed, r.wall_time_secs
    );
    if r.measure_zero_trials > 0 {
        let _ = writeln!(out, "measure-zero trials: {}", r.measure_zero_trials);
    }
    for t in &r.tests {
        let _ = writeln!(out, "\n{}", t.label);
        let _ = writeln!(out, "  {:<14}{:>9}  {:>8}  95% CI", "verdict", "count", "freq");
        distribution_rows(&mut out, &t.distribution);
    }
    for ev in &r.events {
        let _ = writeln!(
            out,
            "\nevent {}: {} of {} trials ({}), conditional verdicts:",
            ev.event.label(),
            ev.probability.count,
            ev.probability.n,
            frequency(&ev.probability)
        );
        for c in &ev.conditional {
            let _ = writeln!(out, " {}", c.label);
            distribution_rows(&mut out, &c.distribution);
        }
    }
    if !r.disagreements.is_empty() {
        let _ = writeln!(out);
        for d in &r.disagreements {
            let _ = writeln!(
                out,
                "disagreement {} vs {}: {} ({})",
                d.a,
                d.b,
                frequency(&d.frequency),
                ci(&d.frequency)
            );
        }
    }
    if let Some(s) = &r.surgery {
        let forced: String = s.surgery.forced.iter().map(|o| o.to_string()).collect();
        let _ = writeln!(out, "\nsurgery, forced prefix ({forced}):");
        for t in &s.tests {
            let _ = writeln!(
                out,
                "  {:<20} changed on {} of {} trials",
                t.label, t.disagreement.count, t.disagreement.n
            );
        }
    }
    if !expectations.is_empty() {
        let _ = writeln!(out, "\nexpectations:");
        for e in expectations {
            let observed = e.estimate.as_ref().map_or_else(|| "unobserved".to_string(), frequency);
            let mark = if e.passed { "ok  " } else { "MISS" };
            let _ = writeln!(out, "  [{mark}] {}  (observed {observed})", e.description);
        }
    }
    out
}
