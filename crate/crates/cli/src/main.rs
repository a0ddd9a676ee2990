use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use boxrules::commands;
use boxrules::config::{self, ExperimentSpec};
use boxrules::error::CliError;
use boxrules_core::EvolutionConfig;

/// Evolves collections of consistent interval-rule models for multi-label
/// classification, trading off F-Score against model size.
#[derive(Parser)]
#[command(name = "boxrules", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on a full dataset and archive the final population
    Train(TrainArgs),
    /// Predict labels for a dataset with an archived model
    Predict(PredictArgs),
    /// Run a cross-validated experiment grid and export statistics
    Evaluate(EvaluateArgs),
    /// Average archived populations into a Pareto front (CSV + SVG)
    Pareto(ParetoArgs),
    /// Dump the per-dimension box-enlargement trace for one instance
    CfsbeTrace(TraceArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Dataset file: header line, then comma-separated numeric rows
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Number of trailing label columns
    #[arg(long)]
    labels: Option<usize>,
    /// Population size [default: 80]
    #[arg(long)]
    pop_size: Option<usize>,
    /// Maximum number of generations [default: 200]
    #[arg(long)]
    generations: Option<usize>,
    /// Mutants created per generation [default: 40]
    #[arg(long)]
    mutants: Option<usize>,
    /// Failed mutation attempts per generation before stopping [default: 2000]
    #[arg(long)]
    max_failed: Option<usize>,
    /// Instances a new rule tries to cover (dataset-specific, required)
    #[arg(long)]
    t: Option<usize>,
    /// Base random seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Key-value config file; command-line flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct PredictArgs {
    /// Model archive produced by `train` or `evaluate --save-populations`
    #[arg(long)]
    model: PathBuf,
    /// Dataset file to predict, same format as for training
    #[arg(long)]
    dataset: PathBuf,
    /// Number of trailing label columns
    #[arg(long)]
    labels: usize,
    /// Model index inside the archive [default: the training-best model]
    #[arg(long)]
    index: Option<usize>,
    /// Output CSV of one binary row per instance
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Cross-validation fold count [default: 10]
    #[arg(long)]
    folds: Option<usize>,
    /// Runs per fold [default: 30]
    #[arg(long)]
    runs: Option<usize>,
    /// Worker threads [default: available parallelism]
    #[arg(long)]
    threads: Option<usize>,
    /// Import a fold assignment instead of splitting randomly
    #[arg(long)]
    folds_file: Option<PathBuf>,
    /// Archive every job's final population under <out>/populations/
    #[arg(long)]
    save_populations: bool,
}

#[derive(Args)]
struct ParetoArgs {
    /// Model archives to average (must share dataset arities)
    #[arg(required = true)]
    archives: Vec<PathBuf>,
    /// Output directory for pareto.csv and pareto.svg
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TraceArgs {
    /// Dataset file
    #[arg(long)]
    dataset: PathBuf,
    /// Number of trailing label columns
    #[arg(long)]
    labels: usize,
    /// Seed instance index
    #[arg(long)]
    instance: usize,
    /// Optional model archive supplying the existing rules
    #[arg(long)]
    model: Option<PathBuf>,
    /// Model index inside the archive [default: the training-best model]
    #[arg(long)]
    index: Option<usize>,
    /// Comma-separated dimension order, e.g. "2,0,1" [default: random]
    #[arg(long)]
    order: Option<String>,
    /// Seed for the random order [default: 0]
    #[arg(long)]
    seed: Option<u64>,
}

fn build_spec(
    common: &CommonArgs,
    folds: Option<usize>,
    runs: Option<usize>,
    threads: Option<usize>,
    folds_file: Option<PathBuf>,
    save_populations: bool,
) -> Result<ExperimentSpec, CliError> {
    let file: BTreeMap<String, String> = match &common.config {
        Some(path) => config::load_config_file(path)?,
        None => BTreeMap::new(),
    };
    let t = config::resolve(common.t, &file, "t", None)?;
    let mut evolution = EvolutionConfig::new(t);
    evolution.pop_size = config::resolve(common.pop_size, &file, "pop-size", Some(80))?;
    evolution.max_generations =
        config::resolve(common.generations, &file, "generations", Some(200))?;
    evolution.mutants_per_generation = config::resolve(common.mutants, &file, "mutants", Some(40))?;
    evolution.max_failed_attempts =
        config::resolve(common.max_failed, &file, "max-failed", Some(2000))?;
    evolution.rng_seed = config::resolve(common.seed, &file, "seed", Some(0))?;

    Ok(ExperimentSpec {
        dataset: config::resolve(common.dataset.clone(), &file, "dataset", None)?,
        labels: config::resolve(common.labels, &file, "labels", None)?,
        folds: config::resolve(folds, &file, "folds", Some(10))?,
        runs: config::resolve(runs, &file, "runs", Some(30))?,
        evolution,
        out: config::resolve(common.out.clone(), &file, "out", None)?,
        threads,
        folds_file,
        save_populations,
    })
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Train(args) => {
            let spec = build_spec(&args.common, None, None, None, None, false)?;
            commands::cmd_train(&spec)
        }
        Command::Predict(args) => commands::cmd_predict(
            &args.model,
            &args.dataset,
            args.labels,
            args.index,
            &args.out,
        ),
        Command::Evaluate(args) => {
            let spec = build_spec(
                &args.common,
                args.folds,
                args.runs,
                args.threads,
                args.folds_file,
                args.save_populations,
            )?;
            commands::cmd_evaluate(&spec)
        }
        Command::Pareto(args) => commands::cmd_pareto(&args.archives, &args.out),
        Command::CfsbeTrace(args) => {
            let text = commands::cmd_cfsbe_trace(
                &args.dataset,
                args.labels,
                args.instance,
                args.model.as_deref(),
                args.index,
                args.order.as_deref(),
                args.seed.unwrap_or(0),
            )?;
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version exit 0; usage errors are validation errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
