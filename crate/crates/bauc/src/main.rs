//! Thin command-line front end over the `bauc` library.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bauc::cli::{
    cmd_estimate, cmd_oracle, cmd_plot, load_experiment_config, run_experiment_plan,
    EstimateKind, EstimateOptions, ModelSource, OracleOptions,
};
use bauc::classifiers::LogRegConfig;
use bauc::dataset::LabelColumn;
use bauc::table::TableFormat;

#[derive(Parser)]
#[command(
    name = "bauc",
    version,
    about = "Closed-form Bayesian AUC estimation for linear classifiers"
)]
struct Cli {
    /// Master seed for every randomized behavior.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the AUC of a classifier trained (or supplied) on a CSV
    /// dataset.
    Estimate(EstimateArgs),
    /// Run an experiment sweep described by a JSON config and write
    /// aggregate/replication CSVs.
    Experiment(ExperimentArgs),
    /// Verify the closed form against the Monte-Carlo posterior oracle
    /// on randomized instances.
    Oracle(OracleArgs),
    /// Render an aggregates CSV as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// CSV dataset with a header row.
    dataset: String,

    /// Label column, by name or 0-based index.
    #[arg(long)]
    label: String,

    /// Label value mapped to class 2 (the positive class).
    #[arg(long)]
    positive: String,

    /// Comma-separated estimators: cbauc, ebauc, cv, binormal, empirical.
    #[arg(long, default_value = "cbauc,ebauc,cv,binormal,empirical")]
    estimators: String,

    /// Use the Fisher discriminant direction instead of logistic
    /// regression.
    #[arg(long, conflicts_with = "weights")]
    lda: bool,

    /// Ridge added to the pooled covariance for --lda.
    #[arg(long, default_value_t = 0.0)]
    ridge: f64,

    /// Evaluate externally supplied weights (JSON {"w": [..], "b": r}).
    #[arg(long)]
    weights: Option<String>,

    /// L2 penalty of the logistic trainer.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,

    /// Fold count for the cv estimator.
    #[arg(long, default_value_t = 5)]
    cv_folds: usize,

    /// Threshold-grid size for the ebauc estimator.
    #[arg(long, default_value_t = 2001)]
    ebauc_grid: usize,

    /// Measure and report per-estimator wall time (the column is 0
    /// otherwise, keeping identical invocations byte-identical).
    #[arg(long)]
    timing: bool,

    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment configuration.
    config: String,

    /// Output directory for aggregates.csv and replications.csv.
    #[arg(long, default_value = "bauc-out")]
    out: PathBuf,

    /// Worker threads for replications (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    /// Dimension of the randomized instances.
    #[arg(long = "P", visible_alias = "p", default_value_t = 2)]
    p: usize,

    /// Class-1 training samples per instance.
    #[arg(long, default_value_t = 10)]
    n1: usize,

    /// Class-2 training samples per instance.
    #[arg(long, default_value_t = 10)]
    n2: usize,

    /// Monte-Carlo posterior draws per trial (>= 1000).
    #[arg(long, default_value_t = 200_000)]
    draws: usize,

    /// Number of randomized trials.
    #[arg(long, default_value_t = 100)]
    trials: usize,

    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct PlotArgs {
    /// Input CSV (typically aggregates.csv).
    csv: String,

    /// Column plotted on the x axis.
    #[arg(long = "x")]
    x_column: String,

    /// Column plotted on the y axis.
    #[arg(long = "y")]
    y_column: String,

    /// Column whose distinct values become separate lines.
    #[arg(long = "series")]
    series_column: String,

    /// Output SVG path.
    #[arg(long)]
    out: String,
}

fn parse_format(s: &str) -> Result<TableFormat, String> {
    match s.to_ascii_lowercase().as_str() {
        "csv" => Ok(TableFormat::Csv),
        "json" => Ok(TableFormat::Json),
        other => Err(format!("unknown format '{other}' (expected csv or json)")),
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Estimate(args) => {
            let format = parse_format(&args.format)?;
            let estimators = args
                .estimators
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse::<EstimateKind>())
                .collect::<bauc::Result<Vec<_>>>()
                .map_err(|e| e.to_string())?;
            let model = if let Some(path) = args.weights {
                ModelSource::Weights { path }
            } else if args.lda {
                ModelSource::Lda { ridge: args.ridge }
            } else {
                ModelSource::Logistic
            };
            let options = EstimateOptions {
                label_column: LabelColumn::parse(&args.label),
                positive_label: args.positive,
                estimators,
                model,
                trainer: LogRegConfig {
                    lambda: args.lambda,
                    ..Default::default()
                },
                cv_folds: args.cv_folds,
                ebauc_grid: args.ebauc_grid,
                seed: cli.seed,
                record_timing: args.timing,
            };
            let table = cmd_estimate(&args.dataset, &options).map_err(|e| e.to_string())?;
            print!("{}", table.to_string_in(format));
            Ok(())
        }
        Command::Experiment(args) => {
            let plan =
                load_experiment_config(&args.config, cli.seed).map_err(|e| e.to_string())?;
            let threads = args.threads.or(plan.threads);
            let report = match threads {
                Some(n) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build()
                        .map_err(|e| e.to_string())?;
                    pool.install(|| run_experiment_plan(&plan.scenarios))
                }
                None => run_experiment_plan(&plan.scenarios),
            }
            .map_err(|e| e.to_string())?;

            fs::create_dir_all(&args.out)
                .map_err(|e| format!("{}: {e}", args.out.display()))?;
            let write_table = |name: &str, table: &bauc::table::ResultTable| -> Result<(), String> {
                let path = args.out.join(name);
                let mut file = fs::File::create(&path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                table
                    .write(&mut file, TableFormat::Csv)
                    .map_err(|e| e.to_string())?;
                file.flush().map_err(|e| e.to_string())
            };
            write_table("aggregates.csv", &report.aggregates)?;
            write_table("replications.csv", &report.replications)?;

            print!("{}", report.aggregates.to_string_in(TableFormat::Csv));
            eprintln!("reference bounds (optimal AUC vs mean measured true AUC):");
            eprint!("{}", report.bounds.to_string_in(TableFormat::Csv));
            if !report.failures.is_empty() {
                for f in &report.failures {
                    eprintln!("scenario failed: {f}");
                }
                return Err(format!("{} scenario(s) failed", report.failures.len()));
            }
            Ok(())
        }
        Command::Oracle(args) => {
            let format = parse_format(&args.format)?;
            let table = cmd_oracle(&OracleOptions {
                p: args.p,
                n1: args.n1,
                n2: args.n2,
                draws: args.draws,
                trials: args.trials,
                seed: cli.seed,
            })
            .map_err(|e| e.to_string())?;
            print!("{}", table.to_string_in(format));
            Ok(())
        }
        Command::Plot(args) => cmd_plot(
            &args.csv,
            &args.x_column,
            &args.y_column,
            &args.series_column,
            &args.out,
        )
        .map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
