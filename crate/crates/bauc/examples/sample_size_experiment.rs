//! Estimator comparison as the training-set size grows: the
//! equal-covariance Gaussian scenario, mean absolute error of each
//! estimator against the classifier's true AUC, rendered as an SVG.
//!
//! A desk-scale version of the headline experiment; expect CBAUC to
//! dominate cross-validation at small n.
//!
//! Run with: cargo run --release --example sample_size_experiment

use bauc::cli::run_experiment_plan;
use bauc::harness::{resolve_scenario, EstimatorKind, RunSettings, ScenarioKind};
use bauc::plot::{render_svg, series_from_rows, Series};
use bauc::table::TableFormat;

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
    let scenarios: Vec<_> = [10, 20, 30, 50, 80]
        .iter()
        .map(|&n| resolve_scenario(&ScenarioKind::EqualCov { p: 4, n1: n, n2: n }, &settings))
        .collect::<bauc::Result<_>>()?;

    let report = run_experiment_plan(&scenarios)?;
    print!("{}", report.aggregates.to_string_in(TableFormat::Csv));

    // Re-plot the aggregate table without touching the filesystem twice.
    let mut series: Vec<Series> = Vec::new();
    for row in report.aggregates.to_string_in(TableFormat::Csv).lines().skip(1) {
        let fields: Vec<String> = row.split(',').map(|s| s.to_string()).collect();
        let headers: Vec<String> = report.aggregates.columns().to_vec();
        for s in series_from_rows(&headers, &[fields], "n1", "mae", "estimator")? {
            match series.iter_mut().find(|existing| existing.name == s.name) {
                Some(existing) => existing.points.extend(s.points),
                None => series.push(s),
            }
        }
    }
    let svg = render_svg(&series, "samples per class", "mean absolute error")?;
    let out = std::env::temp_dir().join("bauc-sample-size-mae.svg");
    std::fs::write(&out, svg)?;
    println!();
    println!("MAE chart written to {}", out.display());
    Ok(())
}
