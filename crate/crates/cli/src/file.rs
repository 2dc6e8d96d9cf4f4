//! Scenario files: TOML on disk, validated before any sampling.

use std::path::PathBuf;

use fcmp_core::harness::{EventSpec, NatureSpec, Scenario, StrategySpec, SurgerySpec, TestSpec};
use serde::{Deserialize, Serialize};
use toml_edit::{DocumentMut, InlineTable, Item, TableLike, Value};

use crate::error::CliError;
use crate::expect::Expectation;

fn default_tests() -> Vec<TestSpec> {
    vec![TestSpec::derivative()]
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

/// Which exports to write next to `report.json`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// One JSON line per trial.
    #[serde(default, skip_serializing_if = "is_false")]
    pub trials_jsonl: bool,
    /// Per-step log ratio of trial `export_trial`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub trajectory: bool,
    /// Final cross-calibration profile table of trial `export_trial`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub crosscal_profiles: bool,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub export_trial: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// The result the scenario reproduces.
    #[serde(default)]
    pub anchor: String,
    pub horizon: usize,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub nature: NatureSpec,
    pub f0: StrategySpec,
    pub f1: StrategySpec,
    #[serde(default = "default_tests")]
    pub tests: Vec<TestSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EventSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surgery: Option<SurgerySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expect: Vec<Expectation>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioFile {
    /// Parses `text`, applying `overrides` (`path=value`) first. `origin`
    /// names the source in diagnostics.
    pub fn parse(text: &str, origin: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut doc: DocumentMut = text.parse().map_err(|e: toml_edit::TomlError| CliError::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let text = doc.to_string();
        let file: ScenarioFile = toml::from_str(&text).map_err(|e| {
            let mut message = e.to_string();
            if let Some(hint) = locate_unknown_key(&text, &message) {
                message = format!("{}\n{hint}", message.trim_end());
            }
            CliError::Parse {
                origin: origin.to_string(),
                message,
            }
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            f0: self.f0.clone(),
            f1: self.f1.clone(),
            nature: self.nature.clone(),
            horizon: self.horizon,
            trials: self.trials,
            master_seed: self.seed,
            tests: self.tests.clone(),
            events: self.events.clone(),
            surgery: self.surgery.clone(),
        }
    }

    /// Checks everything that can be checked without sampling, including
    /// that the strategies build and the surgery prefix is admissible.
    pub fn validate(&self) -> Result<(), CliError> {
        self.scenario().prepare()?;
        if self.output.export_trial >= self.trials {
            return Err(CliError::Invalid(format!(
                "output.export_trial = {} but only {} trials run",
                self.output.export_trial, self.trials
            )));
        }
        for e in &self.expect {
            e.validate(self)?;
        }
        Ok(())
    }
}

/// Sets `path=value` in `doc`. The path is a dotted key whose numeric
/// segments index arrays (`tests.1.lambda`). A bare key that is not at the
/// top level resolves to the unique entry with that name anywhere in the
/// document, so `--set epsilon=0.2` reaches `f0.epsilon`. Values are parsed
/// as TOML, falling back to a plain string.
pub fn apply_override(doc: &mut DocumentMut, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Override(format!("`{spec}` is not of the form key=value")))?;
    let path = path.trim();
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(CliError::Override(format!("`{spec}` has an empty key")));
    }
    let value = parse_value(raw.trim());

    let mut keys: Vec<String> = path.split('.').map(str::to_string).collect();
    if keys.len() == 1 && !doc.contains_key(&keys[0]) {
        let mut found = Vec::new();
        find_key(doc.as_item(), &keys[0], &mut Vec::new(), &mut found);
        if found.len() > 1 {
            let paths: Vec<String> = found.iter().map(|p| p.join(".")).collect();
            return Err(CliError::Override(format!(
                "`{path}` is ambiguous; use one of: {}",
                paths.join(", ")
            )));
        }
        if let Some(p) = found.pop() {
            keys = p;
        }
    }
    set_in_item(doc.as_item_mut(), &keys, value)
        .map_err(|reason| CliError::Override(format!("`{path}`: {reason}")))
}

fn parse_value(raw: &str) -> Value {
    raw.parse::<Value>().unwrap_or_else(|_| Value::from(raw))
}

fn index(key: &str, len: usize) -> Result<usize, String> {
    match key.parse::<usize>() {
        Ok(i) if i < len => Ok(i),
        Ok(i) => Err(format!("index {i} out of range (length {len})")),
        Err(_) => Err(format!("`{key}` indexes an array; use a number")),
    }
}

fn set_in_item(item: &mut Item, keys: &[String], value: Value) -> Result<(), String> {
    match item {
        Item::Table(t) => set_in_table(t, keys, value),
        Item::ArrayOfTables(a) => {
            let i = index(&keys[0], a.len())?;
            if keys.len() == 1 {
                return Err("cannot replace a whole table entry".into());
            }
            set_in_table(a.get_mut(i).expect("checked"), &keys[1..], value)
        }
        Item::Value(v) => set_in_value(v, keys, value),
        Item::None => Err("no such entry".into()),
    }
}

fn set_in_table(t: &mut dyn TableLike, keys: &[String], value: Value) -> Result<(), String> {
    if keys.len() == 1 {
        t.insert(&keys[0], Item::Value(value));
        return Ok(());
    }
    if !t.contains_key(&keys[0]) {
        t.insert(&keys[0], Item::Value(Value::InlineTable(InlineTable::new())));
    }
    set_in_item(t.get_mut(&keys[0]).expect("present"), &keys[1..], value)
}

fn set_in_value(v: &mut Value, keys: &[String], value: Value) -> Result<(), String> {
    match v {
        Value::InlineTable(t) => set_in_table(t, keys, value),
        Value::Array(a) => {
            let i = index(&keys[0], a.len())?;
            if keys.len() == 1 {
                a.replace(i, value);
                Ok(())
            } else {
                set_in_value(a.get_mut(i).expect("checked"), &keys[1..], value)
            }
        }
        _ => Err(format!("`{}` is not a table or array", keys[0])),
    }
}

fn find_key(item: &Item, key: &str, prefix: &mut Vec<String>, found: &mut Vec<Vec<String>>) {
    let mut visit = |k: String, child: &Item, prefix: &mut Vec<String>| {
        prefix.push(k);
        if prefix.last().is_some_and(|k| k == key) {
            found.push(prefix.clone());
        }
        find_key(child, key, prefix, found);
        prefix.pop();
    };
    match item {
        Item::ArrayOfTables(a) => {
            for (i, t) in a.iter().enumerate() {
                prefix.push(i.to_string());
                find_key(&Item::Table(t.clone()), key, prefix, found);
                prefix.pop();
            }
        }
        Item::Value(Value::Array(a)) => {
            for (i, v) in a.iter().enumerate() {
                visit(i.to_string(), &Item::Value(v.clone()), prefix);
            }
        }
        _ => {
            if let Some(t) = item.as_table_like() {
                for (k, child) in t.iter() {
                    visit(k.to_string(), child, prefix);
                }
            }
        }
    }
}

/// Serde reports unknown keys inside tagged tables at the table header;
/// point at the key itself too.
fn locate_unknown_key(text: &str, message: &str) -> Option<String> {
    let rest = message.split("unknown field `").nth(1)?;
    let key = rest.split('`').next()?;
    let from = message
        .split("line ")
        .nth(1)
        .and_then(|s| s.split(|c: char| !c.is_ascii_digit()).next())
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(1);
    text.lines()
        .enumerate()
        .skip(from.saturating_sub(1))
        .find(|(_, line)| {
            line.split(['{', ',']).any(|frag| {
                frag.trim_start()
                    .strip_prefix(key)
                    .is_some_and(|r| r.trim_start().starts_with('='))
            })
        })
        .map(|(i, _)| format!("unknown key `{key}` is on line {}", i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fcmp_core::Expert;

    const BASE: &str = r#"
name = "t"
horizon = 50
trials = 10
nature = { kind = "expert", index = 0 }

[f0]
kind = "claim1"
epsilon = 0.1

[f1]
kind = "dirac"
tail = 1
"#;

    #[test]
    fn parses_with_defaults() {
        let f = ScenarioFile::parse(BASE, "base", &[]).unwrap();
        assert_eq!(f.tests, default_tests());
        assert_eq!(f.nature, NatureSpec::expert(Expert::Zero));
        assert_eq!(f.seed, 0);
    }

    #[test]
    fn overrides_resolve_leaf_keys_and_paths() {
        let f = ScenarioFile::parse(
            BASE,
            "base",
            &["epsilon=0.25".into(), "trials=3".into(), "nature.index=1".into(), "seed=9".into()],
        )
        .unwrap();
        assert_eq!(f.f0, StrategySpec::Claim1 { epsilon: 0.25 });
        assert_eq!(f.trials, 3);
        assert_eq!(f.seed, 9);
        assert_eq!(f.nature, NatureSpec::expert(Expert::One));
    }

    #[test]
    fn ambiguous_and_malformed_overrides() {
        let text = format!("{BASE}\n[[tests]]\nkind = \"derivative\"\nlambda = 2.0\n[[tests]]\nkind = \"non_tail_example\"\nlambda = 3.0\n");
        assert!(matches!(
            ScenarioFile::parse(&text, "x", &["lambda=1.0".into()]),
            Err(CliError::Override(_))
        ));
        assert!(matches!(ScenarioFile::parse(BASE, "x", &["trials".into()]), Err(CliError::Override(_))));
        assert!(matches!(ScenarioFile::parse(&text, "x", &["tests.5.lambda=1".into()]), Err(CliError::Override(_))));
        let f = ScenarioFile::parse(&text, "x", &["tests.1.lambda=1.5".into()]).unwrap();
        assert_eq!(f.tests[1], TestSpec::NonTailExample { lambda: 1.5, burn_in: None });
    }

    #[test]
    fn unknown_keys_are_named_with_their_line() {
        let text = BASE.replace("tail = 1", "tail = 1\ntial = 2");
        let err = ScenarioFile::parse(&text, "bad.scenario", &[]).unwrap_err().to_string();
        assert!(err.contains("tial"), "{err}");
        assert!(err.contains("bad.scenario"), "{err}");
        assert!(err.contains("`tial` is on line 14"), "{err}");
        let err = ScenarioFile::parse(BASE, "x", &["bogus=1".into()]).unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn validation_runs_before_sampling() {
        let err = ScenarioFile::parse(BASE, "x", &["trials=0".into()]).unwrap_err();
        assert!(err.to_string().contains("trials"), "{err}");
        assert!(ScenarioFile::parse(BASE, "x", &["epsilon=0".into()]).is_err());
        assert!(ScenarioFile::parse(BASE, "x", &["output.export_trial=10".into()]).is_err());
    }
}
