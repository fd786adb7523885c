//! Difficulty sweep: the class separation is tuned so the optimal AUC
//! hits each target exactly, then the estimators run at a small sample
//! size. The sample-binormal plug-in over-estimates hardest problems
//! (positive bias at low targets).
//!
//! Run with: cargo run --release --example target_auc_sweep

use bauc::bayes::bayes_optimal_auc;
use bauc::harness::{
    aggregate, resolve_scenario, run_scenario, EstimatorKind, RunSettings, ScenarioKind,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let settings = RunSettings {
        replications: 100,
        master_seed: 42,
        estimators: vec![
            EstimatorKind::Cbauc,
            EstimatorKind::Cvauc,
            EstimatorKind::Binormal,
        ],
        ..Default::default()
    };

    println!("target   resolved_optimum   estimator   mae        mean_bias");
    for &target in &[0.7, 0.8, 0.9] {
        let config = resolve_scenario(
            &ScenarioKind::TargetAucSweep { target, n1: 10, n2: 10 },
            &settings,
        )?;
        let resolved = bayes_optimal_auc(&config.population)?;
        let agg = aggregate(&config, &run_scenario(&config))?;
        for (kind, e) in &agg.per_estimator {
            println!(
                "{target:<8} {resolved:<18.12} {:<11} {:<10.6} {:+.6}",
                kind.name(),
                e.mae,
                e.mean_bias
            );
        }
    }
    println!();
    println!("the resolved optimum matches each target to ~1e-12 (inverse-CDF wiring),");
    println!("and the binormal bias is positive at the low-target end.");
    Ok(())
}
