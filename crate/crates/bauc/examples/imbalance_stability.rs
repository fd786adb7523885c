//! Class-imbalance sweep at fixed total sample size: how stable is each
//! estimator's MAE as the minority fraction shrinks?
//!
//! Run with: cargo run --release --example imbalance_stability

use bauc::harness::{
    aggregate, resolve_scenario, run_scenario, EstimatorKind, RunSettings, ScenarioKind,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let settings = RunSettings {
        replications: 100,
        master_seed: 42,
        estimators: vec![
            EstimatorKind::Cbauc,
            EstimatorKind::Ebauc,
            EstimatorKind::Cvauc,
        ],
        ..Default::default()
    };

    let ratios = [0.1, 0.2, 0.3, 0.4, 0.5];
    let mut spreads: Vec<(EstimatorKind, f64, f64)> = settings
        .estimators
        .iter()
        .map(|&k| (k, f64::INFINITY, f64::NEG_INFINITY))
        .collect();

    println!("ratio   n1/n2    estimator   mae");
    for &ratio in &ratios {
        let config = resolve_scenario(
            &ScenarioKind::Imbalance { p: 4, n_total: 100, ratio },
            &settings,
        )?;
        let agg = aggregate(&config, &run_scenario(&config))?;
        for (kind, e) in &agg.per_estimator {
            println!(
                "{ratio:<7} {:>3}/{:<3}  {:<11} {:.6}",
                config.n1,
                config.n2,
                kind.name(),
                e.mae
            );
            let slot = spreads.iter_mut().find(|(k, _, _)| k == kind).unwrap();
            slot.1 = slot.1.min(e.mae);
            slot.2 = slot.2.max(e.mae);
        }
    }

    println!();
    println!("MAE spread over the ratio sweep (max - min, smaller = more stable):");
    for (kind, min, max) in spreads {
        println!("  {:<10} {:.6}", kind.name(), max - min);
    }
    Ok(())
}
