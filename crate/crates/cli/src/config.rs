//! Experiment configuration: optional key-value config files, command-line
//! override resolution, and the resolved-config snapshot written next to
//! every run's outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use boxrules_core::EvolutionConfig;

use crate::error::CliError;

/// Parses a `key = value` file. `#` starts a comment, blank lines are
/// ignored, keys match the long CLI flag names.
pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut map = BTreeMap::new();
    for (offset, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!(
                "{}: line {}: expected 'key = value', found '{raw}'",
                path.display(),
                offset + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Resolution order: command line, then config file, then built-in default.
pub fn resolve<T: FromStr>(
    cli: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
    default: Option<T>,
) -> Result<T, CliError> {
    if let Some(v) = cli {
        return Ok(v);
    }
    if let Some(raw) = file.get(key) {
        return raw.parse().map_err(|_| {
            CliError::Validation(format!("config key '{key}': cannot parse '{raw}'"))
        });
    }
    default.ok_or_else(|| CliError::Validation(format!("missing required option '--{key}'")))
}

/// Fully resolved experiment description shared by `train` and `evaluate`.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub dataset: PathBuf,
    pub labels: usize,
    pub folds: usize,
    pub runs: usize,
    pub evolution: EvolutionConfig,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub folds_file: Option<PathBuf>,
    pub save_populations: bool,
}

impl ExperimentSpec {
    pub fn validate_for_evaluate(&self) -> Result<(), CliError> {
        if self.folds < 2 {
            return Err(CliError::Validation(
                "cross-validation needs at least 2 folds".into(),
            ));
        }
        if self.runs < 1 {
            return Err(CliError::Validation("runs per fold must be >= 1".into()));
        }
        Ok(())
    }

    /// Key-value snapshot of everything that affects the outputs, written
    /// next to them for reproducibility.
    pub fn resolved_text(&self, include_cv: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dataset = {}", self.dataset.display());
        if include_cv {
            let _ = writeln!(out, "folds = {}", self.folds);
        }
        let _ = writeln!(out, "generations = {}", self.evolution.max_generations);
        let _ = writeln!(out, "labels = {}", self.labels);
        let _ = writeln!(out, "max-failed = {}", self.evolution.max_failed_attempts);
        let _ = writeln!(out, "mutants = {}", self.evolution.mutants_per_generation);
        let _ = writeln!(out, "out = {}", self.out.display());
        let _ = writeln!(out, "pop-size = {}", self.evolution.pop_size);
        if include_cv {
            let _ = writeln!(out, "runs = {}", self.runs);
        }
        let _ = writeln!(out, "seed = {}", self.evolution.rng_seed);
        let _ = writeln!(out, "t = {}", self.evolution.t);
        out
    }
}
