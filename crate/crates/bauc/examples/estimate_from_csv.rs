//! End-to-end estimation on a CSV dataset: generate a small
//! two-Gaussian training set, write it to disk, load it back, train the
//! logistic classifier, and print every AUC estimate.
//!
//! Run with: cargo run --example estimate_from_csv

use bauc::cli::{cmd_estimate, EstimateKind, EstimateOptions, ModelSource};
use bauc::classifiers::LogRegConfig;
use bauc::dataset::{write_csv, Dataset, LabelColumn};
use bauc::numerics::{cholesky, derive_stream, sample_mvn, DenseMatrix, DenseVector};
use bauc::table::TableFormat;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut stream = derive_stream(7, 0);
    let sigma = DenseMatrix::from_rows(2, 2, vec![1.0, 0.4, 0.4, 1.0])?;
    let chol = cholesky(&sigma)?;
    let class1 = sample_mvn(&mut stream, &DenseVector::zeros(2), &chol, 25)?;
    let class2 = sample_mvn(&mut stream, &DenseVector::constant(2, 1.2), &chol, 25)?;
    let dataset = Dataset::from_class_samples(&class1, &class2)?;

    let dir = std::env::temp_dir().join("bauc-estimate-example");
    std::fs::create_dir_all(&dir)?;
    let csv_path = dir.join("train.csv");
    write_csv(&dataset, &csv_path)?;
    println!("wrote {} samples to {}", dataset.n_samples(), csv_path.display());

    let options = EstimateOptions {
        label_column: LabelColumn::parse("label"),
        positive_label: "2".to_string(),
        estimators: EstimateKind::ALL.to_vec(),
        model: ModelSource::Logistic,
        trainer: LogRegConfig::default(),
        cv_folds: 5,
        ebauc_grid: 2001,
        seed: 42,
        record_timing: true,
    };
    let table = cmd_estimate(csv_path.to_str().unwrap(), &options)?;
    print!("{}", table.to_string_in(TableFormat::Csv));
    println!();
    println!("same table as the CLI prints for:");
    println!(
        "  bauc estimate {} --label label --positive 2",
        csv_path.display()
    );
    Ok(())
}
