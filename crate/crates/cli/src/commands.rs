//! Subcommand implementations, kept binary-free so the test suites can call
//! them directly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use boxrules_core::cfsbe::{self, ExpansionOrder};
use boxrules_core::rng::derive_seed;
use boxrules_core::rule::Rule;
use boxrules_core::Rng;

use crate::archive::Archive;
use crate::config::ExperimentSpec;
use crate::error::{internal_model_error, CliError};
use crate::harness;
use crate::loader;
use crate::pareto;
use crate::svg;

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::io(path, e))
}

/// One full training run; archives the population, the training-best model,
/// a readable rendering of it, the generation log, and the resolved config.
pub fn cmd_train(spec: &ExperimentSpec) -> Result<(), CliError> {
    spec.evolution.validate().map_err(CliError::from)?;
    let dataset = loader::load_dataset(&spec.dataset, spec.labels)?;
    ensure_dir(&spec.out)?;

    let result = harness::train_once(&dataset, &spec.evolution)?;
    let archive = Archive::from_run(
        &result,
        dataset.num_features(),
        dataset.num_labels(),
        dataset.names(),
    );
    archive.write(&spec.out.join("population.json"))?;
    archive
        .single_model(archive.best_index)?
        .write(&spec.out.join("best.json"))?;
    write_file(
        &spec.out.join("generations.csv"),
        &harness::generations_csv(&result.logs),
    )?;
    write_file(
        &spec.out.join("best_rules.txt"),
        &render_model(&archive, archive.best_index)?,
    )?;
    write_file(&spec.out.join("config.txt"), &spec.resolved_text(false))?;
    Ok(())
}

fn render_model(archive: &Archive, index: usize) -> Result<String, CliError> {
    let model = archive.model(index)?;
    let mut out = String::new();
    let feature_names = archive.feature_names.as_deref();
    let label_names = archive.label_names.as_deref();
    for rule in model.rules() {
        let _ = writeln!(
            out,
            "{}",
            rule.simplify().render(feature_names, label_names)
        );
    }
    let _ = write!(out, "DEFAULT ");
    match label_names {
        Some(names) => {
            let assigned: Vec<&str> = archive
                .default_rule
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == 1)
                .map(|(i, _)| names.get(i).map(String::as_str).unwrap_or("?"))
                .collect();
            let _ = writeln!(out, "{{{}}}", assigned.join(", "));
        }
        None => {
            let bits: Vec<String> = archive.default_rule.iter().map(|b| b.to_string()).collect();
            let _ = writeln!(out, "[{}]", bits.join(", "));
        }
    }
    Ok(out)
}

/// Predicts one binary row per instance with an archived model (the
/// training-best one unless an index is given).
pub fn cmd_predict(
    model_path: &Path,
    dataset_path: &Path,
    labels: usize,
    index: Option<usize>,
    out_path: &Path,
) -> Result<(), CliError> {
    let archive = Archive::read(model_path)?;
    let dataset = loader::load_dataset(dataset_path, labels)?;
    if dataset.num_features() != archive.num_features {
        return Err(CliError::Validation(format!(
            "dataset has {} features but the model expects {}",
            dataset.num_features(),
            archive.num_features
        )));
    }
    if dataset.num_labels() != archive.num_labels {
        return Err(CliError::Validation(format!(
            "dataset has {} labels but the model expects {}",
            dataset.num_labels(),
            archive.num_labels
        )));
    }
    let model = archive.model(index.unwrap_or(archive.best_index))?;
    let default = archive.default_rule()?;

    let mut out = String::new();
    match &archive.label_names {
        Some(names) => out.push_str(&names.join(",")),
        None => {
            let names: Vec<String> = (0..archive.num_labels)
                .map(|l| format!("label{l}"))
                .collect();
            out.push_str(&names.join(","));
        }
    }
    out.push('\n');
    for i in 0..dataset.num_instances() {
        let row = model
            .predict(&default, dataset.instance(i))
            .map_err(internal_model_error)?;
        for (j, bit) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{bit}");
        }
        out.push('\n');
    }
    write_file(out_path, &out)
}

/// Cross-validated experiment grid. Writes the statistics table, the fold
/// assignment, and the resolved config; optionally archives every job's
/// final population.
pub fn cmd_evaluate(spec: &ExperimentSpec) -> Result<(), CliError> {
    let dataset = loader::load_dataset(&spec.dataset, spec.labels)?;
    ensure_dir(&spec.out)?;
    let populations_dir = spec.out.join("populations");
    let save_dir = if spec.save_populations {
        ensure_dir(&populations_dir)?;
        Some(populations_dir.as_path())
    } else {
        None
    };

    let output = harness::cross_validate(&dataset, spec, save_dir)?;
    write_file(
        &spec.out.join("stats.csv"),
        &harness::stats_csv(&output.records, spec.folds),
    )?;
    loader::save_fold_split(&output.split, &spec.out.join("folds.csv"))?;
    write_file(&spec.out.join("config.txt"), &spec.resolved_text(true))?;
    Ok(())
}

/// Averages archived populations and exports the non-dominated compromise
/// rows as CSV plus an SVG scatter.
pub fn cmd_pareto(archive_paths: &[std::path::PathBuf], out_dir: &Path) -> Result<(), CliError> {
    if archive_paths.is_empty() {
        return Err(CliError::Validation("no archives given".into()));
    }
    let mut populations = Vec::with_capacity(archive_paths.len());
    let mut arity: Option<(usize, usize)> = None;
    for path in archive_paths {
        let archive = Archive::read(path)?;
        let this = (archive.num_features, archive.num_labels);
        match arity {
            None => arity = Some(this),
            Some(expected) if expected != this => {
                return Err(CliError::Validation(format!(
                    "{}: arity {:?} differs from {:?}; archives must share dataset arities",
                    path.display(),
                    this,
                    expected
                )));
            }
            Some(_) => {}
        }
        populations.push(archive.fitness_matrix());
    }
    let front = pareto::averaged_front(&populations)?;
    ensure_dir(out_dir)?;
    write_file(&out_dir.join("pareto.csv"), &pareto::pareto_csv(&front))?;
    write_file(&out_dir.join("pareto.svg"), &svg::scatter_svg(&front))?;
    Ok(())
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".to_string()
    } else {
        format!("{v}")
    }
}

/// Renders the per-dimension expansion trace for one seed instance against
/// the rules of an archived model (or no rules at all).
pub fn cmd_cfsbe_trace(
    dataset_path: &Path,
    labels: usize,
    instance: usize,
    model_path: Option<&Path>,
    model_index: Option<usize>,
    order_spec: Option<&str>,
    seed: u64,
) -> Result<String, CliError> {
    let dataset = loader::load_dataset(dataset_path, labels)?;
    if instance >= dataset.num_instances() {
        return Err(CliError::Validation(format!(
            "instance {instance} out of range for {} instances",
            dataset.num_instances()
        )));
    }
    let rules: Vec<Rule> = match model_path {
        Some(path) => {
            let archive = Archive::read(path)?;
            if archive.num_features != dataset.num_features() {
                return Err(CliError::Validation(
                    "model and dataset feature counts differ".into(),
                ));
            }
            let model = archive.model(model_index.unwrap_or(archive.best_index))?;
            model.rules().to_vec()
        }
        None => Vec::new(),
    };

    let order = match order_spec {
        Some(text) => {
            let dims: Vec<usize> = text
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| {
                        CliError::Validation(format!("invalid dimension index '{s}' in order"))
                    })
                })
                .collect::<Result<_, _>>()?;
            ExpansionOrder::new(dims).map_err(|e| CliError::Validation(e.to_string()))?
        }
        None => ExpansionOrder::random(
            dataset.num_features(),
            &mut Rng::seed_from_u64(derive_seed(seed, &[instance as u64])),
        ),
    };

    let point = dataset.instance(instance);
    let (result, trace) = cfsbe::enlarge_box_traced(&rules, point, &order)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let mut out = String::new();
    let _ = writeln!(out, "instance {instance}, {} existing rules", rules.len());
    let order_text: Vec<String> = order.as_slice().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "order: {}", order_text.join(","));
    for (step_no, step) in trace.iter().enumerate() {
        let _ = writeln!(
            out,
            "step {}: dim {}, obstructors {}, interval [{}, {})",
            step_no + 1,
            step.dim,
            step.obstructors,
            fmt_bound(step.lower),
            fmt_bound(step.upper)
        );
    }
    let _ = writeln!(out, "result:");
    for d in 0..result.dims() {
        let t = result.test(d);
        let _ = writeln!(
            out,
            "  f{d}: [{}, {})",
            fmt_bound(t.lower()),
            fmt_bound(t.upper())
        );
    }
    Ok(out)
}
