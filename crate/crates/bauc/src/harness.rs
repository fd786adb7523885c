//! Scenario generation, replication engine, and aggregation for the
//! synthetic estimator-comparison experiments.
//!
//! Every replication derives its own random streams from
//! `(master_seed, replication_index)`, so an experiment is a pure
//! function of its configuration no matter how many threads run it:
//! data generation uses stream `2r`, cross-validation folds use stream
//! `2r + 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{
    bayes_optimal_auc, cbauc, ebauc, population_auc, posterior_update, sample_binormal_auc,
    sample_moments, GaussianPopulation, PriorHyperparams,
};
use crate::classifiers::{train_logreg_l2, LogRegConfig};
use crate::dataset::Dataset;
use crate::estimators::cv_auc;
use crate::numerics::{
    cholesky, derive_stream, inverse_std_normal_cdf, mix_seed, sample_mvn, DenseMatrix,
    DenseVector,
};
use crate::{Error, Result};

/// The training-set-only estimators compared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Cbauc,
    Ebauc,
    Cvauc,
    Binormal,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::Cbauc,
        EstimatorKind::Ebauc,
        EstimatorKind::Cvauc,
        EstimatorKind::Binormal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Cbauc => "cbauc",
            EstimatorKind::Ebauc => "ebauc",
            EstimatorKind::Cvauc => "cvauc",
            EstimatorKind::Binormal => "binormal",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cbauc" => Ok(EstimatorKind::Cbauc),
            "ebauc" => Ok(EstimatorKind::Ebauc),
            "cv" | "cvauc" | "cv-auc" => Ok(EstimatorKind::Cvauc),
            "binormal" => Ok(EstimatorKind::Binormal),
            other => Err(Error::InvalidArgument(format!(
                "unknown estimator '{other}' (expected cbauc, ebauc, cvauc, or binormal)"
            ))),
        }
    }
}

/// Experiment-level settings shared by every scenario of a sweep.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub replications: usize,
    pub master_seed: u64,
    pub estimators: Vec<EstimatorKind>,
    pub trainer: LogRegConfig,
    pub cv_folds: usize,
    pub ebauc_grid: usize,
    /// Wall-clock timing is inherently non-reproducible, so it is
    /// opt-in; with it off, experiment outputs are byte-identical
    /// across reruns.
    pub record_timing: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            replications: 200,
            master_seed: 42,
            estimators: vec![
                EstimatorKind::Cbauc,
                EstimatorKind::Ebauc,
                EstimatorKind::Cvauc,
            ],
            trainer: LogRegConfig::default(),
            cv_folds: 5,
            ebauc_grid: 2001,
            record_timing: false,
        }
    }
}

/// Raw scenario parameters before resolution.
#[derive(Debug, Clone)]
pub enum ScenarioKind {
    /// μ1 = 0, μ2 = 1 (all ones), Σ1 = Σ2 = I at the requested P.
    EqualCov { p: usize, n1: usize, n2: usize },
    /// The fixed 4-dimensional assumption-violation scenario:
    /// μ2 = (-1.5, -0.75, 0.75, 1.5), Σ1 = I,
    /// Σ2 = diag(0.25, 0.75, 1.25, 1.75).
    UnequalCov { n1: usize, n2: usize },
    /// Equal-covariance population with ⌈ratio·N⌉ minority samples in
    /// class 1 and the rest in class 2.
    Imbalance { p: usize, n_total: usize, ratio: f64 },
    /// P = 2, μ1 = 0, μ2 = 1, Σ = σ²I with σ = 1/Φ⁻¹(target), so the
    /// optimal AUC equals the target.
    TargetAucSweep { target: f64, n1: usize, n2: usize },
    /// User-supplied population.
    Custom {
        population: GaussianPopulation,
        n1: usize,
        n2: usize,
    },
}

/// A fully resolved scenario: population, sample sizes, estimator set,
/// and seeds.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: String,
    pub p: usize,
    pub n1: usize,
    pub n2: usize,
    pub ratio: Option<f64>,
    pub target: Option<f64>,
    pub population: GaussianPopulation,
    pub replications: usize,
    pub master_seed: u64,
    pub estimators: Vec<EstimatorKind>,
    pub trainer: LogRegConfig,
    pub cv_folds: usize,
    pub ebauc_grid: usize,
    pub record_timing: bool,
}

impl ScenarioConfig {
    /// The swept secondary parameter, if any (imbalance ratio or target
    /// AUC).
    pub fn ratio_or_target(&self) -> Option<f64> {
        self.ratio.or(self.target)
    }
}

/// Resolves raw scenario parameters into a full configuration,
/// validating sizes against the enabled estimators.
pub fn resolve_scenario(kind: &ScenarioKind, settings: &RunSettings) -> Result<ScenarioConfig> {
    if settings.replications == 0 {
        return Err(Error::Configuration(
            "replications must be at least 1".to_string(),
        ));
    }
    settings.trainer.validate()?;
    if settings.estimators.is_empty() {
        return Err(Error::Configuration("no estimators enabled".to_string()));
    }

    let (name, p, n1, n2, ratio, target, population) = match kind {
        ScenarioKind::EqualCov { p, n1, n2 } => {
            let pop = standard_population(*p)?;
            ("equal_cov", *p, *n1, *n2, None, None, pop)
        }
        ScenarioKind::UnequalCov { n1, n2 } => {
            let pop = GaussianPopulation::new(
                DenseVector::zeros(4),
                DenseVector::new(vec![-1.5, -0.75, 0.75, 1.5])?,
                DenseMatrix::identity(4),
                DenseMatrix::diag(&[0.25, 0.75, 1.25, 1.75]),
            )?;
            ("unequal_cov", 4, *n1, *n2, None, None, pop)
        }
        ScenarioKind::Imbalance { p, n_total, ratio } => {
            if !(*ratio > 0.0 && *ratio <= 0.5) {
                return Err(Error::Configuration(format!(
                    "imbalance ratio must lie in (0, 0.5], got {ratio}"
                )));
            }
            let n1 = (*ratio * *n_total as f64).ceil() as usize;
            let n2 = n_total
                .checked_sub(n1)
                .ok_or_else(|| Error::Configuration("imbalance ratio too large".to_string()))?;
            let pop = standard_population(*p)?;
            ("imbalance", *p, n1, n2, Some(*ratio), None, pop)
        }
        ScenarioKind::TargetAucSweep { target, n1, n2 } => {
            if !(*target > 0.5 && *target < 1.0) {
                return Err(Error::Configuration(format!(
                    "target AUC must lie in (0.5, 1), got {target}"
                )));
            }
            let sigma = 1.0 / inverse_std_normal_cdf(*target)?;
            let pop = GaussianPopulation::equal_cov(
                DenseVector::zeros(2),
                DenseVector::constant(2, 1.0),
                DenseMatrix::identity(2).scale(sigma * sigma),
            )?;
            ("target_auc_sweep", 2, *n1, *n2, None, Some(*target), pop)
        }
        ScenarioKind::Custom { population, n1, n2 } => (
            "custom",
            population.dim(),
            *n1,
            *n2,
            None,
            None,
            population.clone(),
        ),
    };

    if n1 == 0 || n2 == 0 {
        return Err(Error::Configuration(format!(
            "both classes need samples (n1={n1}, n2={n2})"
        )));
    }
    if settings.estimators.contains(&EstimatorKind::Cvauc) {
        let need = settings.cv_folds.max(2);
        if n1 < need || n2 < need {
            return Err(Error::Configuration(format!(
                "cross-validation with {} folds needs at least {need} samples per class \
                 (n1={n1}, n2={n2})",
                settings.cv_folds
            )));
        }
    }

    Ok(ScenarioConfig {
        kind: name.to_string(),
        p,
        n1,
        n2,
        ratio,
        target,
        population,
        replications: settings.replications,
        master_seed: settings.master_seed,
        estimators: settings.estimators.clone(),
        trainer: settings.trainer.clone(),
        cv_folds: settings.cv_folds,
        ebauc_grid: settings.ebauc_grid,
        record_timing: settings.record_timing,
    })
}

/// μ1 = 0, μ2 = 1, Σ = I at dimension `p`.
fn standard_population(p: usize) -> Result<GaussianPopulation> {
    if p == 0 {
        return Err(Error::Configuration("dimension must be positive".into()));
    }
    GaussianPopulation::equal_cov(
        DenseVector::zeros(p),
        DenseVector::constant(p, 1.0),
        DenseMatrix::identity(p),
    )
}

/// One replication's outputs: the trained model's true AUC and every
/// enabled estimate, with per-estimator wall time when timing is on.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub replication_index: usize,
    pub true_auc: f64,
    pub estimates: BTreeMap<EstimatorKind, f64>,
    pub wall_us: BTreeMap<EstimatorKind, u64>,
    pub failure: Option<String>,
}

impl ReplicationRecord {
    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }
}

/// Runs one replication: draw the training set from the population,
/// train the classifier, evaluate the true AUC and every enabled
/// estimator. Failures are recorded in the result, never dropped.
pub fn run_replication(config: &ScenarioConfig, replication_index: usize) -> ReplicationRecord {
    let mut record = ReplicationRecord {
        replication_index,
        true_auc: f64::NAN,
        estimates: BTreeMap::new(),
        wall_us: BTreeMap::new(),
        failure: None,
    };
    if let Err(e) = run_replication_inner(config, replication_index, &mut record) {
        record.failure = Some(e.to_string());
    }
    record
}

fn run_replication_inner(
    config: &ScenarioConfig,
    replication_index: usize,
    record: &mut ReplicationRecord,
) -> Result<()> {
    let rep = replication_index as u64;
    let mut data_stream = derive_stream(config.master_seed, 2 * rep);

    let pop = &config.population;
    let l1 = cholesky(&pop.sigma1)?;
    let l2 = cholesky(&pop.sigma2)?;
    let class1 = sample_mvn(&mut data_stream, &pop.mu1, &l1, config.n1)?;
    let class2 = sample_mvn(&mut data_stream, &pop.mu2, &l2, config.n2)?;
    let dataset = Dataset::from_class_samples(&class1, &class2)?;

    let model = train_logreg_l2(&dataset, &config.trainer)?;
    record.true_auc = population_auc(&model, pop)?;

    let prior = PriorHyperparams::default_for(config.p);
    for &estimator in &config.estimators {
        let start = config.record_timing.then(Instant::now);
        let value = match estimator {
            EstimatorKind::Cbauc => {
                let moments = sample_moments(&dataset)?;
                let post = posterior_update(&prior, &moments)?;
                cbauc(&model, &post)?
            }
            EstimatorKind::Ebauc => {
                let moments = sample_moments(&dataset)?;
                let post = posterior_update(&prior, &moments)?;
                ebauc(&model.w, &post, config.ebauc_grid)?
            }
            EstimatorKind::Cvauc => {
                let mut cv_stream = derive_stream(config.master_seed, 2 * rep + 1);
                cv_auc(&dataset, config.cv_folds, &config.trainer, &mut cv_stream)?
            }
            EstimatorKind::Binormal => {
                let moments = sample_moments(&dataset)?;
                sample_binormal_auc(&model, &moments)?
            }
        };
        let elapsed = start.map(|t| t.elapsed().as_micros() as u64).unwrap_or(0);
        record.estimates.insert(estimator, value);
        record.wall_us.insert(estimator, elapsed);
    }
    Ok(())
}

/// Per-estimator error summary over the non-failed replications.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorAggregate {
    /// Mean |estimate - true AUC|.
    pub mae: f64,
    /// Standard deviation (divisor n-1) of estimate - true AUC.
    pub std_of_error: f64,
    /// Mean of estimate - true AUC.
    pub mean_bias: f64,
    /// Mean per-replication wall time in microseconds (0 when timing
    /// was off).
    pub mean_wall_us: f64,
}

/// Aggregated results of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRecord {
    pub kind: String,
    pub p: usize,
    pub n1: usize,
    pub n2: usize,
    pub ratio_or_target: Option<f64>,
    pub per_estimator: BTreeMap<EstimatorKind, EstimatorAggregate>,
    pub reps_used: usize,
    pub reps_failed: usize,
}

/// Folds replication records into MAE / error-std / bias summaries.
/// Failed records are excluded and counted; if everything failed the
/// aggregation is an error.
pub fn aggregate(config: &ScenarioConfig, records: &[ReplicationRecord]) -> Result<AggregateRecord> {
    let used: Vec<&ReplicationRecord> = records.iter().filter(|r| !r.is_failed()).collect();
    let failed = records.len() - used.len();
    if used.is_empty() {
        return Err(Error::Configuration(format!(
            "all {failed} replications failed; nothing to aggregate"
        )));
    }
    let n = used.len() as f64;
    let mut per_estimator = BTreeMap::new();
    for &estimator in &config.estimators {
        let mut abs_sum = 0.0;
        let mut bias_sum = 0.0;
        let mut wall_sum = 0.0;
        for r in &used {
            let est = r.estimates.get(&estimator).ok_or_else(|| {
                Error::Configuration(format!(
                    "replication {} is missing estimator {estimator}",
                    r.replication_index
                ))
            })?;
            let err = est - r.true_auc;
            abs_sum += err.abs();
            bias_sum += err;
            wall_sum += *r.wall_us.get(&estimator).unwrap_or(&0) as f64;
        }
        let mean_bias = bias_sum / n;
        let mut var_sum = 0.0;
        for r in &used {
            let err = r.estimates[&estimator] - r.true_auc;
            var_sum += (err - mean_bias) * (err - mean_bias);
        }
        let std_of_error = if used.len() > 1 {
            (var_sum / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        per_estimator.insert(
            estimator,
            EstimatorAggregate {
                mae: abs_sum / n,
                std_of_error,
                mean_bias,
                mean_wall_us: wall_sum / n,
            },
        );
    }
    Ok(AggregateRecord {
        kind: config.kind.clone(),
        p: config.p,
        n1: config.n1,
        n2: config.n2,
        ratio_or_target: config.ratio_or_target(),
        per_estimator,
        reps_used: used.len(),
        reps_failed: failed,
    })
}

/// Runs every replication of one scenario, in parallel over the
/// current rayon pool. Records come back in replication order
/// regardless of scheduling.
pub fn run_scenario(config: &ScenarioConfig) -> Vec<ReplicationRecord> {
    (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect()
}

/// One scenario's full output inside a sweep.
#[derive(Debug)]
pub struct ScenarioOutcome {
    pub config: ScenarioConfig,
    pub records: Vec<ReplicationRecord>,
    pub aggregate: Result<AggregateRecord>,
}

/// Runs a sweep of scenarios in order. Per-scenario aggregation errors
/// are carried in the outcome instead of aborting the sweep.
pub fn run_experiment(configs: &[ScenarioConfig]) -> Vec<ScenarioOutcome> {
    configs
        .iter()
        .map(|config| {
            let records = run_scenario(config);
            let aggregate = aggregate(config, &records);
            ScenarioOutcome {
                config: config.clone(),
                records,
                aggregate,
            }
        })
        .collect()
}

/// Derives a distinct master seed for scenario `index` of a sweep so
/// swept scenarios do not reuse each other's sample draws.
pub fn scenario_seed(master_seed: u64, index: usize) -> u64 {
    mix_seed(master_seed, index as u64)
}

/// One closed-form-versus-oracle comparison on a randomized instance.
#[derive(Debug, Clone)]
pub struct OracleTrial {
    pub trial: usize,
    pub closed_form: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// (closed_form - estimate) / std_error.
    pub z: f64,
}

/// Builds a random instance (random SPD population, dataset drawn from
/// it, posterior, random unit direction) and compares the closed form
/// against the Monte-Carlo oracle.
pub fn oracle_trial(
    p: usize,
    n1: usize,
    n2: usize,
    draws: usize,
    master_seed: u64,
    trial: usize,
) -> Result<OracleTrial> {
    let mut stream = derive_stream(master_seed, trial as u64);

    // Random population: spread-out means, random SPD covariance.
    let mu1 = DenseVector::zeros(p);
    let mu2 = DenseVector::new(
        (0..p)
            .map(|_| stream.standard_normal() / (p as f64).sqrt())
            .collect(),
    )?;
    let mut g = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            g.set(i, j, stream.standard_normal());
        }
    }
    let mut sigma = g.mat_mul(&g.transpose())?.scale(1.0 / p as f64);
    sigma.add_ridge(0.25);
    let pop = GaussianPopulation::equal_cov(mu1, mu2, sigma)?;

    let l = cholesky(&pop.sigma1)?;
    let class1 = sample_mvn(&mut stream, &pop.mu1, &l, n1)?;
    let class2 = sample_mvn(&mut stream, &pop.mu2, &l, n2)?;
    let dataset = Dataset::from_class_samples(&class1, &class2)?;
    let post = posterior_update(&PriorHyperparams::default_for(p), &sample_moments(&dataset)?)?;

    let mut w: DenseVector = DenseVector::new((0..p).map(|_| stream.standard_normal()).collect())?;
    let norm = w.norm();
    if norm > 0.0 {
        w = w.scale(1.0 / norm);
    } else {
        w.set(0, 1.0);
    }
    let model = crate::bayes::LinearModel::new(w, 0.0);

    let closed_form = cbauc(&model, &post)?;
    let (estimate, std_error) =
        crate::bayes::mc_cbauc_oracle(&model, &post, &mut stream, draws)?;
    let z = (closed_form - estimate) / std_error;
    Ok(OracleTrial {
        trial,
        closed_form,
        estimate,
        std_error,
        z,
    })
}

/// Sanity bound used by tests and the harness report: the true AUC of
/// any trained linear classifier cannot exceed the optimal AUC.
pub fn optimal_auc_bound(config: &ScenarioConfig) -> Option<f64> {
    bayes_optimal_auc(&config.population).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn settings(estimators: Vec<EstimatorKind>, reps: usize) -> RunSettings {
        RunSettings {
            replications: reps,
            master_seed: 42,
            estimators,
            ..Default::default()
        }
    }

    #[test]
    fn resolve_equal_cov_reaches_known_optimum() {
        let config = resolve_scenario(
            &ScenarioKind::EqualCov { p: 4, n1: 10, n2: 10 },
            &settings(vec![EstimatorKind::Cbauc], 1),
        )
        .unwrap();
        approx(
            bayes_optimal_auc(&config.population).unwrap(),
            0.921_350_396_474_857_4,
            1e-12,
        );
        assert_eq!(config.kind, "equal_cov");
    }

    #[test]
    fn resolve_target_sweep_inverts_the_cdf() {
        for &target in &[0.7, 0.8, 0.8413, 0.9, 0.97] {
            let config = resolve_scenario(
                &ScenarioKind::TargetAucSweep { target, n1: 10, n2: 10 },
                &settings(vec![EstimatorKind::Cbauc], 1),
            )
            .unwrap();
            approx(bayes_optimal_auc(&config.population).unwrap(), target, 1e-9);
        }
        assert!(resolve_scenario(
            &ScenarioKind::TargetAucSweep { target: 0.5, n1: 10, n2: 10 },
            &settings(vec![EstimatorKind::Cbauc], 1),
        )
        .is_err());
    }

    #[test]
    fn resolve_imbalance_counts() {
        let config = resolve_scenario(
            &ScenarioKind::Imbalance { p: 2, n_total: 20, ratio: 0.5 },
            &settings(vec![EstimatorKind::Cbauc], 1),
        )
        .unwrap();
        assert_eq!((config.n1, config.n2), (10, 10));
        let skewed = resolve_scenario(
            &ScenarioKind::Imbalance { p: 2, n_total: 100, ratio: 0.13 },
            &settings(vec![EstimatorKind::Cbauc], 1),
        )
        .unwrap();
        assert_eq!((skewed.n1, skewed.n2), (13, 87));
        assert!(resolve_scenario(
            &ScenarioKind::Imbalance { p: 2, n_total: 100, ratio: 0.7 },
            &settings(vec![EstimatorKind::Cbauc], 1),
        )
        .is_err());
    }

    #[test]
    fn resolve_rejects_small_classes_for_cv() {
        let err = resolve_scenario(
            &ScenarioKind::EqualCov { p: 2, n1: 3, n2: 50 },
            &settings(vec![EstimatorKind::Cvauc], 1),
        );
        assert!(err.is_err());
    }

    #[test]
    fn replication_is_deterministic() {
        let config = resolve_scenario(
            &ScenarioKind::EqualCov { p: 2, n1: 10, n2: 10 },
            &settings(EstimatorKind::ALL.to_vec(), 1),
        )
        .unwrap();
        let a = run_replication(&config, 3);
        let b = run_replication(&config, 3);
        assert!(a.failure.is_none(), "{:?}", a.failure);
        assert_eq!(a.true_auc.to_bits(), b.true_auc.to_bits());
        assert_eq!(a.estimates, b.estimates);
    }

    #[test]
    fn replication_has_exactly_the_enabled_estimates() {
        let config = resolve_scenario(
            &ScenarioKind::EqualCov { p: 2, n1: 5, n2: 5 },
            &settings(vec![EstimatorKind::Cbauc], 1),
        )
        .unwrap();
        let r = run_replication(&config, 0);
        assert_eq!(r.estimates.len(), 1);
        assert!(r.estimates.contains_key(&EstimatorKind::Cbauc));
    }

    #[test]
    fn true_auc_stays_below_the_optimum() {
        let config = resolve_scenario(
            &ScenarioKind::EqualCov { p: 2, n1: 50, n2: 50 },
            &settings(vec![EstimatorKind::Cbauc], 1),
        )
        .unwrap();
        let bound = bayes_optimal_auc(&config.population).unwrap();
        for rep in 0..20 {
            let r = run_replication(&config, rep);
            assert!(r.failure.is_none());
            assert!(r.true_auc > 0.5 && r.true_auc <= bound + 1e-12, "{}", r.true_auc);
            for v in r.estimates.values() {
                assert!((0.0..=1.0).contains(v));
            }
        }
    }

    #[test]
    fn aggregate_hand_values() {
        let config = resolve_scenario(
            &ScenarioKind::EqualCov { p: 2, n1: 5, n2: 5 },
            &settings(vec![EstimatorKind::Cbauc], 1),
        )
        .unwrap();
        let make = |idx: usize, est: f64, truth: f64| ReplicationRecord {
            replication_index: idx,
            true_auc: truth,
            estimates: BTreeMap::from([(EstimatorKind::Cbauc, est)]),
            wall_us: BTreeMap::from([(EstimatorKind::Cbauc, 0)]),
            failure: None,
        };
        // single exact record
        let single = aggregate(&config, &[make(0, 0.8, 0.8)]).unwrap();
        let agg = &single.per_estimator[&EstimatorKind::Cbauc];
        approx(agg.mae, 0.0, 0.0);
        approx(agg.mean_bias, 0.0, 0.0);
        approx(agg.std_of_error, 0.0, 0.0);
        // errors +0.1 and -0.1
        let two = aggregate(&config, &[make(0, 0.9, 0.8), make(1, 0.7, 0.8)]).unwrap();
        let agg = &two.per_estimator[&EstimatorKind::Cbauc];
        approx(agg.mae, 0.1, 1e-15);
        approx(agg.mean_bias, 0.0, 1e-15);
        approx(agg.std_of_error, 0.1 * 2.0_f64.sqrt(), 1e-15);
        assert!(agg.mae >= agg.mean_bias.abs());
        // all failed
        let failed = ReplicationRecord {
            failure: Some("boom".to_string()),
            ..make(0, 0.9, 0.8)
        };
        assert!(aggregate(&config, &[failed]).is_err());
    }

    #[test]
    fn aggregate_excludes_failed_and_counts_them() {
        let config = resolve_scenario(
            &ScenarioKind::EqualCov { p: 2, n1: 5, n2: 5 },
            &settings(vec![EstimatorKind::Cbauc], 1),
        )
        .unwrap();
        let good = ReplicationRecord {
            replication_index: 0,
            true_auc: 0.8,
            estimates: BTreeMap::from([(EstimatorKind::Cbauc, 0.9)]),
            wall_us: BTreeMap::new(),
            failure: None,
        };
        let bad = ReplicationRecord {
            replication_index: 1,
            true_auc: f64::NAN,
            estimates: BTreeMap::new(),
            wall_us: BTreeMap::new(),
            failure: Some("training failed".to_string()),
        };
        let agg = aggregate(&config, &[good, bad]).unwrap();
        assert_eq!(agg.reps_used, 1);
        assert_eq!(agg.reps_failed, 1);
    }

    #[test]
    fn sweep_of_one_config_equals_direct_aggregation() {
        let config = resolve_scenario(
            &ScenarioKind::EqualCov { p: 2, n1: 8, n2: 8 },
            &settings(vec![EstimatorKind::Cbauc, EstimatorKind::Binormal], 10),
        )
        .unwrap();
        let outcomes = run_experiment(std::slice::from_ref(&config));
        assert_eq!(outcomes.len(), 1);
        let direct = aggregate(&config, &run_scenario(&config)).unwrap();
        assert_eq!(outcomes[0].aggregate.as_ref().unwrap(), &direct);
    }

    #[test]
    fn scenario_seeds_are_distinct() {
        let seeds: Vec<u64> = (0..100).map(|i| scenario_seed(42, i)).collect();
        let mut dedup = seeds.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), seeds.len());
    }

    #[test]
    fn oracle_trial_runs_and_is_reasonable() {
        let t = oracle_trial(2, 10, 10, 5_000, 7, 0).unwrap();
        assert!(t.closed_form >= 0.0 && t.closed_form <= 1.0);
        assert!(t.std_error > 0.0);
        assert!(t.z.abs() < 10.0, "wildly inconsistent oracle trial: {t:?}");
    }
}
