//! Evaluating an externally trained classifier: weights come from a
//! JSON file (`{"w": [..], "b": r}`), not from the bundled trainer.
//! Shows that the AUC is threshold-free (the intercept never matters)
//! and exactly 1/2 for a direction orthogonal to the posterior mean
//! difference.
//!
//! Run with: cargo run --example external_weights

use bauc::bayes::{cbauc, posterior_update, sample_moments, LinearModel, PriorHyperparams};
use bauc::cli::load_weights;
use bauc::dataset::Dataset;
use bauc::numerics::{derive_stream, sample_mvn, DenseMatrix, DenseVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("bauc-weights-example");
    std::fs::create_dir_all(&dir)?;
    let weights_path = dir.join("weights.json");
    std::fs::write(&weights_path, r#"{"w": [0.9, -0.2], "b": -0.35}"#)?;
    let model = load_weights(&weights_path)?;
    println!("loaded w = {:?}, b = {}", model.w.entries(), model.b);

    let mut stream = derive_stream(99, 0);
    let eye = DenseMatrix::identity(2);
    let class1 = sample_mvn(&mut stream, &DenseVector::zeros(2), &eye, 30)?;
    let class2 = sample_mvn(&mut stream, &DenseVector::new(vec![1.0, 0.2])?, &eye, 30)?;
    let dataset = Dataset::from_class_samples(&class1, &class2)?;
    let post = posterior_update(&PriorHyperparams::default_for(2), &sample_moments(&dataset)?)?;

    println!("cbauc(w, b=-0.35)  = {:.9}", cbauc(&model, &post)?);
    let shifted = LinearModel::new(model.w.clone(), 10.0);
    println!("cbauc(w, b=10)     = {:.9} (intercept-free)", cbauc(&shifted, &post)?);

    // A direction orthogonal to m2* - m1* scores exactly 1/2.
    let diff = post.m2_star.add_scaled(&post.m1_star, -1.0)?;
    let orth = LinearModel::new(DenseVector::new(vec![-diff.get(1), diff.get(0)])?, 0.0);
    println!("cbauc(orthogonal)  = {:.9}", cbauc(&orth, &post)?);
    Ok(())
}
