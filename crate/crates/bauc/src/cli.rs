//! Command implementations behind the `bauc` binary: dataset
//! estimation, experiment execution from JSON configs, closed-form
//! versus Monte-Carlo verification, and SVG plotting.
//!
//! Everything here is a thin layer over the library modules so the same
//! entry points are usable programmatically (the crate examples call
//! them directly).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;

use crate::bayes::{
    bayes_optimal_auc, cbauc, ebauc, posterior_update, sample_binormal_auc, sample_moments,
    GaussianPopulation, LinearModel, PriorHyperparams,
};
use crate::classifiers::{lda_direction, predict_scores, train_logreg_l2, LogRegConfig};
use crate::dataset::{load_csv, LabelColumn};
use crate::estimators::{cv_auc, empirical_auc};
use crate::harness::{
    aggregate, oracle_trial, resolve_scenario, run_scenario, AggregateRecord, EstimatorKind,
    ReplicationRecord, RunSettings, ScenarioConfig, ScenarioKind, ScenarioOutcome,
};
use crate::numerics::{derive_stream, DenseMatrix, DenseVector};
use crate::table::{Cell, ResultTable};
use crate::{Error, Result};

/// Estimators selectable from `bauc estimate` (the harness set plus the
/// empirical AUC of the training scores themselves).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Cbauc,
    Ebauc,
    Cv,
    Binormal,
    EmpiricalOnTrain,
}

impl EstimateKind {
    pub const ALL: [EstimateKind; 5] = [
        EstimateKind::Cbauc,
        EstimateKind::Ebauc,
        EstimateKind::Cv,
        EstimateKind::Binormal,
        EstimateKind::EmpiricalOnTrain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimateKind::Cbauc => "cbauc",
            EstimateKind::Ebauc => "ebauc",
            EstimateKind::Cv => "cv",
            EstimateKind::Binormal => "binormal",
            EstimateKind::EmpiricalOnTrain => "empirical",
        }
    }
}

impl FromStr for EstimateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cbauc" => Ok(EstimateKind::Cbauc),
            "ebauc" => Ok(EstimateKind::Ebauc),
            "cv" | "cvauc" => Ok(EstimateKind::Cv),
            "binormal" => Ok(EstimateKind::Binormal),
            "empirical" | "empirical-on-train" => Ok(EstimateKind::EmpiricalOnTrain),
            other => Err(Error::InvalidArgument(format!(
                "unknown estimator '{other}' (expected cbauc, ebauc, cv, binormal, empirical)"
            ))),
        }
    }
}

/// How `bauc estimate` obtains the model to score.
#[derive(Debug, Clone)]
pub enum ModelSource {
    /// Train L2-regularized logistic regression on the dataset.
    Logistic,
    /// Fisher discriminant from the sample moments, with a ridge.
    Lda { ridge: f64 },
    /// Externally supplied weights (JSON file `{"w": [..], "b": r}`).
    Weights { path: String },
}

/// Options for `bauc estimate`.
#[derive(Debug, Clone)]
pub struct EstimateOptions {
    pub label_column: LabelColumn,
    pub positive_label: String,
    pub estimators: Vec<EstimateKind>,
    pub model: ModelSource,
    pub trainer: LogRegConfig,
    pub cv_folds: usize,
    pub ebauc_grid: usize,
    pub seed: u64,
    /// Populate the wall-time column with measurements. Off by default
    /// so identical invocations produce identical tables.
    pub record_timing: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    w: Vec<f64>,
    b: f64,
}

/// Loads `{"w": [..], "b": r}`.
pub fn load_weights(path: impl AsRef<Path>) -> Result<LinearModel> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let parsed: WeightsFile = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| Error::Parse(format!("weights file at {}: {}", e.path(), e.inner())))?;
    Ok(LinearModel::new(DenseVector::new(parsed.w)?, parsed.b))
}

/// Runs the requested estimators against one dataset and returns one
/// row per estimator (name, value, wall time).
pub fn cmd_estimate(dataset_path: &str, options: &EstimateOptions) -> Result<ResultTable> {
    let dataset = load_csv(dataset_path, &options.label_column, &options.positive_label)?;
    let moments = sample_moments(&dataset)?;

    if options.estimators.contains(&EstimateKind::Cv) {
        let need = options.cv_folds;
        if moments.n1 < need || moments.n2 < need {
            return Err(Error::Configuration(format!(
                "cv requested with {} folds but class sizes are {} and {}; \
                 drop cv or use fewer folds",
                options.cv_folds, moments.n1, moments.n2
            )));
        }
    }

    let model = match &options.model {
        ModelSource::Logistic => train_logreg_l2(&dataset, &options.trainer)?,
        ModelSource::Lda { ridge } => lda_direction(&moments, *ridge)?,
        ModelSource::Weights { path } => load_weights(path)?,
    };
    if model.w.len() != dataset.dim() {
        return Err(Error::DimensionMismatch(format!(
            "model has {} weights but dataset has {} features",
            model.w.len(),
            dataset.dim()
        )));
    }

    let prior = PriorHyperparams::default_for(dataset.dim());
    let mut table = ResultTable::new(vec![
        "estimator".to_string(),
        "value".to_string(),
        "wall_us".to_string(),
    ]);
    for &kind in &options.estimators {
        let start = options.record_timing.then(Instant::now);
        let value = match kind {
            EstimateKind::Cbauc => {
                let post = posterior_update(&prior, &moments)?;
                cbauc(&model, &post)
            }
            EstimateKind::Ebauc => {
                let post = posterior_update(&prior, &moments)?;
                ebauc(&model.w, &post, options.ebauc_grid)
            }
            EstimateKind::Cv => {
                let mut stream = derive_stream(options.seed, 1);
                cv_auc(&dataset, options.cv_folds, &options.trainer, &mut stream)
            }
            EstimateKind::Binormal => sample_binormal_auc(&model, &moments),
            EstimateKind::EmpiricalOnTrain => {
                let scores = predict_scores(&model, &dataset)?;
                empirical_auc(&scores, dataset.labels())
            }
        }
        .map_err(|e| Error::Configuration(format!("estimator {}: {e}", kind.name())))?;
        let wall = start.map(|t| t.elapsed().as_micros() as i64).unwrap_or(0);
        table.push_row(vec![
            Cell::from(kind.name()),
            Cell::from(value),
            Cell::from(wall),
        ])?;
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// experiment configs

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfigFile {
    #[serde(default)]
    master_seed: Option<u64>,
    #[serde(default = "default_replications")]
    replications: usize,
    #[serde(default = "default_estimators")]
    estimators: Vec<EstimatorKind>,
    #[serde(default)]
    trainer: LogRegConfig,
    #[serde(default = "default_cv_folds")]
    cv_folds: usize,
    #[serde(default = "default_ebauc_grid")]
    ebauc_grid: usize,
    #[serde(default)]
    record_timing: bool,
    #[serde(default)]
    threads: Option<usize>,
    scenarios: Vec<ScenarioSpec>,
}

fn default_replications() -> usize {
    200
}

fn default_estimators() -> Vec<EstimatorKind> {
    vec![
        EstimatorKind::Cbauc,
        EstimatorKind::Ebauc,
        EstimatorKind::Cvauc,
    ]
}

fn default_cv_folds() -> usize {
    5
}

fn default_ebauc_grid() -> usize {
    2001
}

/// One scenario block of a config file; list-valued fields sweep.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ScenarioSpec {
    EqualCov {
        p: usize,
        n_per_class: Vec<usize>,
    },
    UnequalCov {
        n_per_class: Vec<usize>,
    },
    Imbalance {
        p: usize,
        n_total: usize,
        ratios: Vec<f64>,
    },
    TargetAucSweep {
        targets: Vec<f64>,
        n_per_class: Vec<usize>,
    },
    Custom {
        mu1: Vec<f64>,
        mu2: Vec<f64>,
        sigma1: Vec<Vec<f64>>,
        sigma2: Vec<Vec<f64>>,
        n1: usize,
        n2: usize,
    },
}

fn matrix_from_nested(rows: &[Vec<f64>]) -> Result<DenseMatrix> {
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "covariance rows must form a square matrix ({n} rows, row of length {})",
                row.len()
            )));
        }
        data.extend_from_slice(row);
    }
    DenseMatrix::from_rows(n, n, data)
}

impl ScenarioSpec {
    fn expand(&self) -> Result<Vec<ScenarioKind>> {
        let kinds = match self {
            ScenarioSpec::EqualCov { p, n_per_class } => n_per_class
                .iter()
                .map(|&n| ScenarioKind::EqualCov { p: *p, n1: n, n2: n })
                .collect(),
            ScenarioSpec::UnequalCov { n_per_class } => n_per_class
                .iter()
                .map(|&n| ScenarioKind::UnequalCov { n1: n, n2: n })
                .collect(),
            ScenarioSpec::Imbalance { p, n_total, ratios } => ratios
                .iter()
                .map(|&ratio| ScenarioKind::Imbalance {
                    p: *p,
                    n_total: *n_total,
                    ratio,
                })
                .collect(),
            ScenarioSpec::TargetAucSweep { targets, n_per_class } => {
                let mut out = Vec::new();
                for &target in targets {
                    for &n in n_per_class {
                        out.push(ScenarioKind::TargetAucSweep { target, n1: n, n2: n });
                    }
                }
                out
            }
            ScenarioSpec::Custom {
                mu1,
                mu2,
                sigma1,
                sigma2,
                n1,
                n2,
            } => {
                let population = GaussianPopulation::new(
                    DenseVector::new(mu1.clone())?,
                    DenseVector::new(mu2.clone())?,
                    matrix_from_nested(sigma1)?,
                    matrix_from_nested(sigma2)?,
                )?;
                vec![ScenarioKind::Custom {
                    population,
                    n1: *n1,
                    n2: *n2,
                }]
            }
        };
        if kinds.is_empty() {
            return Err(Error::Configuration(
                "scenario block expands to nothing (empty sweep list)".to_string(),
            ));
        }
        Ok(kinds)
    }
}

/// A parsed experiment: resolved scenario sweep plus thread preference.
#[derive(Debug)]
pub struct ExperimentPlan {
    pub scenarios: Vec<ScenarioConfig>,
    pub threads: Option<usize>,
}

/// Parses and resolves an experiment config file. Unknown keys are
/// rejected with the JSON path of the offender. The `default_seed`
/// (usually the CLI `--seed`) applies when the file has no
/// `master_seed`; each scenario of the sweep gets its own derived seed.
pub fn load_experiment_config(path: impl AsRef<Path>, default_seed: u64) -> Result<ExperimentPlan> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let parsed: ExperimentConfigFile = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| Error::Parse(format!("config at {}: {}", e.path(), e.inner())))?;

    if parsed.replications == 0 {
        return Err(Error::Parse(
            "config at replications: must be at least 1".to_string(),
        ));
    }
    let master = parsed.master_seed.unwrap_or(default_seed);
    let base = RunSettings {
        replications: parsed.replications,
        master_seed: master,
        estimators: parsed.estimators,
        trainer: parsed.trainer,
        cv_folds: parsed.cv_folds,
        ebauc_grid: parsed.ebauc_grid,
        record_timing: parsed.record_timing,
    };

    let mut scenarios = Vec::new();
    for spec in &parsed.scenarios {
        for kind in spec.expand()? {
            let settings = RunSettings {
                master_seed: crate::harness::scenario_seed(master, scenarios.len()),
                ..base.clone()
            };
            scenarios.push(resolve_scenario(&kind, &settings)?);
        }
    }
    if scenarios.is_empty() {
        return Err(Error::Configuration("config has no scenarios".to_string()));
    }
    Ok(ExperimentPlan {
        scenarios,
        threads: parsed.threads,
    })
}

/// Builds the aggregate table (one row per scenario and estimator).
pub fn aggregates_table(outcomes: &[(AggregateRecord, &ScenarioConfig)]) -> Result<ResultTable> {
    let mut table = ResultTable::new(
        [
            "kind",
            "p",
            "n1",
            "n2",
            "ratio_or_target",
            "estimator",
            "mae",
            "std_of_error",
            "mean_bias",
            "reps_used",
            "mean_wall_us",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    for (agg, _) in outcomes {
        for (estimator, e) in &agg.per_estimator {
            table.push_row(vec![
                Cell::from(agg.kind.as_str()),
                Cell::from(agg.p),
                Cell::from(agg.n1),
                Cell::from(agg.n2),
                agg.ratio_or_target.map(Cell::from).unwrap_or(Cell::Empty),
                Cell::from(estimator.name()),
                Cell::from(e.mae),
                Cell::from(e.std_of_error),
                Cell::from(e.mean_bias),
                Cell::from(agg.reps_used),
                Cell::from(e.mean_wall_us),
            ])?;
        }
    }
    Ok(table)
}

/// Builds the raw replication table (one row per replication and
/// estimator; failed replications carry their reason).
pub fn replications_table(outcomes: &[ScenarioOutcome]) -> Result<ResultTable> {
    let mut table = ResultTable::new(
        [
            "scenario_index",
            "kind",
            "p",
            "n1",
            "n2",
            "ratio_or_target",
            "replication",
            "true_auc",
            "estimator",
            "estimate",
            "wall_us",
            "status",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    for (idx, outcome) in outcomes.iter().enumerate() {
        let c = &outcome.config;
        let scenario_cells = |r: &ReplicationRecord| {
            vec![
                Cell::from(idx),
                Cell::from(c.kind.as_str()),
                Cell::from(c.p),
                Cell::from(c.n1),
                Cell::from(c.n2),
                c.ratio_or_target().map(Cell::from).unwrap_or(Cell::Empty),
                Cell::from(r.replication_index),
            ]
        };
        for r in &outcome.records {
            if let Some(reason) = &r.failure {
                let mut row = scenario_cells(r);
                row.extend([
                    Cell::Empty,
                    Cell::from("-"),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::from(format!("failed: {reason}")),
                ]);
                table.push_row(row)?;
                continue;
            }
            for (estimator, value) in &r.estimates {
                let mut row = scenario_cells(r);
                row.extend([
                    Cell::from(r.true_auc),
                    Cell::from(estimator.name()),
                    Cell::from(*value),
                    Cell::from(*r.wall_us.get(estimator).unwrap_or(&0) as i64),
                    Cell::from("ok"),
                ]);
                table.push_row(row)?;
            }
        }
    }
    Ok(table)
}

/// Outputs of a full experiment run.
pub struct ExperimentReport {
    pub aggregates: ResultTable,
    pub replications: ResultTable,
    /// Scenario kinds that failed to aggregate, with reasons.
    pub failures: Vec<String>,
    /// Optimal-AUC bound per scenario (printed for reference beside the
    /// measured true-AUC means, where defined).
    pub bounds: ResultTable,
}

/// Runs an experiment plan on the current rayon pool.
pub fn run_experiment_plan(scenarios: &[ScenarioConfig]) -> Result<ExperimentReport> {
    let outcomes: Vec<ScenarioOutcome> = scenarios
        .iter()
        .map(|config| {
            let records = run_scenario(config);
            let agg = aggregate(config, &records);
            ScenarioOutcome {
                config: config.clone(),
                records,
                aggregate: agg,
            }
        })
        .collect();

    let mut good = Vec::new();
    let mut failures = Vec::new();
    for outcome in &outcomes {
        match &outcome.aggregate {
            Ok(agg) => good.push((agg.clone(), &outcome.config)),
            Err(e) => failures.push(format!(
                "{} p={} n1={} n2={}: {e}",
                outcome.config.kind, outcome.config.p, outcome.config.n1, outcome.config.n2
            )),
        }
    }

    let mut bounds = ResultTable::new(
        ["kind", "p", "n1", "n2", "optimal_auc", "mean_true_auc"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    for outcome in &outcomes {
        let c = &outcome.config;
        let optimal = bayes_optimal_auc(&c.population)
            .map(Cell::from)
            .unwrap_or(Cell::Empty);
        let used: Vec<&ReplicationRecord> =
            outcome.records.iter().filter(|r| !r.is_failed()).collect();
        let mean_true = if used.is_empty() {
            Cell::Empty
        } else {
            Cell::from(used.iter().map(|r| r.true_auc).sum::<f64>() / used.len() as f64)
        };
        bounds.push_row(vec![
            Cell::from(c.kind.as_str()),
            Cell::from(c.p),
            Cell::from(c.n1),
            Cell::from(c.n2),
            optimal,
            mean_true,
        ])?;
    }

    Ok(ExperimentReport {
        aggregates: aggregates_table(&good)?,
        replications: replications_table(&outcomes)?,
        failures,
        bounds,
    })
}

/// Options for `bauc oracle`.
#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub p: usize,
    pub n1: usize,
    pub n2: usize,
    pub draws: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Closed-form versus Monte-Carlo verification: one row per trial plus
/// a final row with the fraction of |z| <= 3.
pub fn cmd_oracle(options: &OracleOptions) -> Result<ResultTable> {
    if options.draws < 1000 {
        return Err(Error::InvalidArgument(format!(
            "oracle needs at least 1000 draws, got {}",
            options.draws
        )));
    }
    if options.trials < 1 {
        return Err(Error::InvalidArgument("oracle needs at least 1 trial".into()));
    }
    let trials: Vec<_> = (0..options.trials)
        .into_par_iter()
        .map(|t| oracle_trial(options.p, options.n1, options.n2, options.draws, options.seed, t))
        .collect::<Result<_>>()?;

    let mut table = ResultTable::new(
        ["trial", "cbauc", "oracle_estimate", "std_error", "z", "pass_within_3se"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let mut passes = 0usize;
    for t in &trials {
        let pass = t.z.abs() <= 3.0;
        passes += pass as usize;
        table.push_row(vec![
            Cell::from(t.trial),
            Cell::from(t.closed_form),
            Cell::from(t.estimate),
            Cell::from(t.std_error),
            Cell::from(t.z),
            Cell::from(pass as i64),
        ])?;
    }
    table.push_row(vec![
        Cell::from("fraction"),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::from(passes as f64 / trials.len() as f64),
    ])?;
    Ok(table)
}

/// Renders an aggregates CSV into an SVG line chart.
pub fn cmd_plot(
    csv_path: &str,
    x_column: &str,
    y_column: &str,
    series_column: &str,
    output_path: &str,
) -> Result<()> {
    let (headers, rows) = crate::plot::read_csv_table(csv_path)?;
    let series = crate::plot::series_from_rows(&headers, &rows, x_column, y_column, series_column)?;
    let svg = crate::plot::render_svg(&series, x_column, y_column)?;
    fs::write(output_path, svg).map_err(|e| Error::Io(format!("{output_path}: {e}")))?;
    Ok(())
}

/// Collects results alongside their estimator map for table-free
/// consumers (examples, tests).
pub fn estimator_map(records: &[ReplicationRecord]) -> BTreeMap<EstimatorKind, Vec<f64>> {
    let mut out: BTreeMap<EstimatorKind, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.is_failed()) {
        for (k, v) in &r.estimates {
            out.entry(*k).or_default().push(*v);
        }
    }
    out
}
