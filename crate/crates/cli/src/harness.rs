//! Training and cross-validation harness.
//!
//! Evaluation runs `folds x runs` independent jobs. Each job derives its own
//! seed as `derive_seed(base, [fold, run])` and jobs are merged in (fold,
//! run) order, so the experiment is deterministic regardless of how many
//! worker threads execute it.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use boxrules_core::evolution::{self, GenerationLog, StopReason};
use boxrules_core::metrics;
use boxrules_core::rng::derive_seed;
use boxrules_core::{Dataset, FitnessTuple, FoldSplit, Rng, RunResult};

use crate::archive::{best_model_index, Archive};
use crate::config::ExperimentSpec;
use crate::error::{internal_model_error, CliError};
use crate::loader;

/// One (fold, run) result row.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub fold: usize,
    pub run: usize,
    pub train_fscore: f64,
    pub test_fscore: f64,
    pub rules: usize,
}

/// Final-population fitness of one job, kept for Pareto-style analysis.
#[derive(Clone, Debug)]
pub struct FinalFitness {
    pub fold: usize,
    pub run: usize,
    pub fitness: Vec<FitnessTuple>,
}

#[derive(Debug)]
pub struct CrossValOutput {
    pub records: Vec<RunRecord>,
    pub final_fitness: Vec<FinalFitness>,
    pub split: FoldSplit,
}

pub fn train_once(
    dataset: &Dataset,
    cfg: &evolution::EvolutionConfig,
) -> Result<RunResult, CliError> {
    Ok(evolution::run(dataset, cfg)?)
}

fn run_job(
    dataset: &Dataset,
    split: &FoldSplit,
    spec: &ExperimentSpec,
    fold: usize,
    run: usize,
    save_dir: Option<&Path>,
) -> Result<(RunRecord, FinalFitness), CliError> {
    let (train_idx, test_idx) = split.train_test_indices(fold);
    let train = dataset.subset(&train_idx)?;
    let test = dataset.subset(&test_idx)?;

    let mut evo = spec.evolution.clone();
    evo.rng_seed = derive_seed(spec.evolution.rng_seed, &[fold as u64, run as u64]);
    let result = evolution::run(&train, &evo)?;

    let best = best_model_index(&result.population);
    let (best_model, best_fit) = &result.population[best];
    let test_fit =
        metrics::evaluate(best_model, &result.default_rule, &test).map_err(internal_model_error)?;

    if let Some(dir) = save_dir {
        let archive = Archive::from_run(
            &result,
            dataset.num_features(),
            dataset.num_labels(),
            dataset.names(),
        );
        archive.write(&dir.join(format!("fold{fold}_run{run}.json")))?;
    }

    let record = RunRecord {
        fold,
        run,
        train_fscore: best_fit.fscore,
        test_fscore: test_fit.fscore,
        rules: best_fit.size,
    };
    let fitness = FinalFitness {
        fold,
        run,
        fitness: result.population.iter().map(|(_, f)| *f).collect(),
    };
    Ok((record, fitness))
}

/// Runs the full folds x runs grid, in parallel when more than one thread is
/// available.
pub fn cross_validate(
    dataset: &Dataset,
    spec: &ExperimentSpec,
    save_dir: Option<&Path>,
) -> Result<CrossValOutput, CliError> {
    spec.validate_for_evaluate()?;
    spec.evolution.validate().map_err(CliError::from)?;

    let split = match &spec.folds_file {
        Some(path) => {
            let split = loader::load_fold_split(path, dataset.num_instances())?;
            if split.fold_count() != spec.folds {
                return Err(CliError::Validation(format!(
                    "fold file has {} folds, expected {}",
                    split.fold_count(),
                    spec.folds
                )));
            }
            split
        }
        None => {
            let mut rng = Rng::seed_from_u64(derive_seed(spec.evolution.rng_seed, &[]));
            FoldSplit::random(dataset, spec.folds, &mut rng)?
        }
    };

    let jobs: Vec<(usize, usize)> = (0..spec.folds)
        .flat_map(|f| (0..spec.runs).map(move |r| (f, r)))
        .collect();
    let threads = spec
        .threads
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .clamp(1, jobs.len().max(1));

    type JobSlot = Option<Result<(RunRecord, FinalFitness), CliError>>;
    let results: Mutex<Vec<JobSlot>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let cursor = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let idx = cursor.fetch_add(1, Ordering::Relaxed);
                if idx >= jobs.len() {
                    break;
                }
                let (fold, run) = jobs[idx];
                let outcome = run_job(dataset, &split, spec, fold, run, save_dir);
                results.lock().expect("no poisoned lock")[idx] = Some(outcome);
            });
        }
    });

    let mut records = Vec::with_capacity(jobs.len());
    let mut final_fitness = Vec::with_capacity(jobs.len());
    for slot in results.into_inner().expect("no poisoned lock") {
        let (record, fitness) = slot.expect("every job ran")?;
        records.push(record);
        final_fitness.push(fitness);
    }
    Ok(CrossValOutput {
        records,
        final_fitness,
        split,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let collected: Vec<f64> = values.collect();
    collected.iter().sum::<f64>() / collected.len() as f64
}

/// Sample standard deviation; a single observation has none.
fn std_dev(values: &[f64]) -> f64 {
    if values.len() <= 1 {
        return 0.0;
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

/// Statistics table: one row per (fold, run) plus one `overall` aggregate
/// row. The aggregate averages per-fold means, and its spread columns
/// average the per-fold standard deviations over the runs.
pub fn stats_csv(records: &[RunRecord], folds: usize) -> String {
    let mut out =
        String::from("fold,run,train_fscore,test_fscore,rules,test_fscore_std,rules_std\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},,",
            r.fold, r.run, r.train_fscore, r.test_fscore, r.rules
        );
    }

    let mut fold_test_means = Vec::with_capacity(folds);
    let mut fold_test_stds = Vec::with_capacity(folds);
    let mut fold_rule_means = Vec::with_capacity(folds);
    let mut fold_rule_stds = Vec::with_capacity(folds);
    let mut fold_train_means = Vec::with_capacity(folds);
    for fold in 0..folds {
        let test: Vec<f64> = records
            .iter()
            .filter(|r| r.fold == fold)
            .map(|r| r.test_fscore)
            .collect();
        let rules: Vec<f64> = records
            .iter()
            .filter(|r| r.fold == fold)
            .map(|r| r.rules as f64)
            .collect();
        let train: Vec<f64> = records
            .iter()
            .filter(|r| r.fold == fold)
            .map(|r| r.train_fscore)
            .collect();
        fold_test_means.push(mean(test.iter().copied()));
        fold_test_stds.push(std_dev(&test));
        fold_rule_means.push(mean(rules.iter().copied()));
        fold_rule_stds.push(std_dev(&rules));
        fold_train_means.push(mean(train.iter().copied()));
    }

    let _ = writeln!(
        out,
        "overall,mean,{},{},{},{},{}",
        mean(fold_train_means.into_iter()),
        mean(fold_test_means.into_iter()),
        mean(fold_rule_means.into_iter()),
        mean(fold_test_stds.into_iter()),
        mean(fold_rule_stds.into_iter()),
    );
    out
}

/// Overall (mean test F-Score, mean rule count) as reported in the stats
/// table's aggregate row.
pub fn overall_means(records: &[RunRecord], folds: usize) -> (f64, f64) {
    let mut test = Vec::with_capacity(folds);
    let mut rules = Vec::with_capacity(folds);
    for fold in 0..folds {
        test.push(mean(
            records
                .iter()
                .filter(|r| r.fold == fold)
                .map(|r| r.test_fscore),
        ));
        rules.push(mean(
            records
                .iter()
                .filter(|r| r.fold == fold)
                .map(|r| r.rules as f64),
        ));
    }
    (mean(test.into_iter()), mean(rules.into_iter()))
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Line-per-generation summary of a run's logs.
pub fn generations_csv(logs: &[GenerationLog]) -> String {
    let mut out = String::from(
        "generation,best_fscore,median_fscore,min_size,median_size,max_size,failed_attempts,stop_reason\n",
    );
    for log in logs {
        let mut fscores: Vec<f64> = log.fitness.iter().map(|f| f.fscore).collect();
        fscores.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
        let mut sizes: Vec<f64> = log.fitness.iter().map(|f| f.size as f64).collect();
        sizes.sort_by(|a, b| a.partial_cmp(b).expect("finite sizes"));
        let stop = match log.stop {
            None => "",
            Some(StopReason::GenerationsExhausted) => "generations_exhausted",
            Some(StopReason::FailedAttemptLimit) => "failed_attempt_limit",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            log.generation,
            fscores.last().expect("non-empty population"),
            median(&fscores),
            sizes.first().expect("non-empty population"),
            median(&sizes),
            sizes.last().expect("non-empty population"),
            log.failed_attempts,
            stop
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use boxrules_core::evolution::EvolutionConfig;
    use boxrules_core::oracle::toy_lattice;

    fn toy_spec(folds: usize, runs: usize, threads: Option<usize>) -> ExperimentSpec {
        let mut evolution = EvolutionConfig::new(3);
        evolution.pop_size = 6;
        evolution.max_generations = 3;
        evolution.mutants_per_generation = 4;
        evolution.rng_seed = 11;
        ExperimentSpec {
            dataset: "unused".into(),
            labels: 3,
            folds,
            runs,
            evolution,
            out: "unused".into(),
            threads,
            folds_file: None,
            save_populations: false,
        }
    }

    #[test]
    fn grid_shape_and_ordering() {
        let dataset = toy_lattice(40);
        let out = cross_validate(&dataset, &toy_spec(2, 2, Some(1)), None).unwrap();
        let coords: Vec<(usize, usize)> = out.records.iter().map(|r| (r.fold, r.run)).collect();
        assert_eq!(coords, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let dataset = toy_lattice(40);
        let a = cross_validate(&dataset, &toy_spec(2, 2, Some(1)), None).unwrap();
        let b = cross_validate(&dataset, &toy_spec(2, 2, Some(4)), None).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(stats_csv(&a.records, 2), stats_csv(&b.records, 2));
    }

    #[test]
    fn stats_table_has_run_rows_plus_one_aggregate() {
        let dataset = toy_lattice(40);
        let out = cross_validate(&dataset, &toy_spec(2, 2, Some(2)), None).unwrap();
        let csv = stats_csv(&out.records, 2);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 1 + 4 + 1, "header, 4 runs, 1 aggregate");
        assert!(lines.last().unwrap().starts_with("overall,mean,"));
    }

    #[test]
    fn aggregate_matches_hand_average() {
        let records = vec![
            RunRecord {
                fold: 0,
                run: 0,
                train_fscore: 0.5,
                test_fscore: 0.4,
                rules: 2,
            },
            RunRecord {
                fold: 0,
                run: 1,
                train_fscore: 0.7,
                test_fscore: 0.6,
                rules: 4,
            },
            RunRecord {
                fold: 1,
                run: 0,
                train_fscore: 0.9,
                test_fscore: 0.8,
                rules: 6,
            },
            RunRecord {
                fold: 1,
                run: 1,
                train_fscore: 0.9,
                test_fscore: 1.0,
                rules: 8,
            },
        ];
        let (test_mean, rule_mean) = overall_means(&records, 2);
        assert!((test_mean - 0.7).abs() < 1e-12);
        assert!((rule_mean - 5.0).abs() < 1e-12);
        let csv = stats_csv(&records, 2);
        let aggregate = csv.trim_end().lines().last().unwrap();
        let fields: Vec<&str> = aggregate.split(',').collect();
        assert_eq!(&fields[..2], &["overall", "mean"]);
        let parsed: Vec<f64> = fields[2..].iter().map(|s| s.parse().unwrap()).collect();
        // train mean (0.6+0.9)/2, test mean, rule mean, per-fold stds averaged
        let expected = [0.75, 0.7, 5.0, 0.02f64.sqrt(), 2.0f64.sqrt()];
        for (got, want) in parsed.iter().zip(expected) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn generations_csv_shape() {
        let dataset = toy_lattice(30);
        let mut cfg = EvolutionConfig::new(2);
        cfg.pop_size = 5;
        cfg.max_generations = 4;
        cfg.mutants_per_generation = 3;
        let result = train_once(&dataset, &cfg).unwrap();
        let csv = generations_csv(&result.logs);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("generation,best_fscore"));
        assert!(lines[4].ends_with("generations_exhausted"));
    }
}
