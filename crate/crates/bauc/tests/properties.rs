//! Property tests for the numerical kernel and the estimators.

use bauc::bayes::{cbauc, posterior_update, sample_moments, LinearModel, PriorHyperparams};
use bauc::dataset::{ClassLabel, Dataset};
use bauc::estimators::empirical_auc;
use bauc::numerics::{
    cholesky, regularized_incomplete_beta, std_normal_cdf, DenseMatrix, DenseVector,
};
use proptest::prelude::*;

/// Binomial-sum closed form for integer parameters:
/// I(x; a, b) = sum_{j=a}^{a+b-1} C(a+b-1, j) x^j (1-x)^(a+b-1-j).
fn binomial_sum_beta(x: f64, a: u32, b: u32) -> f64 {
    let n = a + b - 1;
    let mut total = 0.0;
    for j in a..=n {
        total += choose(n, j) * x.powi(j as i32) * (1.0 - x).powi((n - j) as i32);
    }
    total
}

fn choose(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

proptest! {
    #[test]
    fn beta_complement_identity(
        x in 0.0..=1.0f64,
        a in 0.05..25.0f64,
        b in 0.05..25.0f64,
    ) {
        let direct = regularized_incomplete_beta(x, a, b).unwrap();
        let complement = regularized_incomplete_beta(1.0 - x, b, a).unwrap();
        prop_assert!((direct - (1.0 - complement)).abs() <= 1e-12);
    }

    #[test]
    fn beta_matches_binomial_sum_for_integer_params(
        x in 0.0..=1.0f64,
        a in 1u32..=5,
        b in 1u32..=5,
    ) {
        let cf = regularized_incomplete_beta(x, a as f64, b as f64).unwrap();
        let sum = binomial_sum_beta(x, a, b);
        prop_assert!((cf - sum).abs() <= 1e-10, "cf {cf} vs sum {sum}");
    }

    #[test]
    fn beta_monotone_in_x(
        x1 in 0.0..=1.0f64,
        x2 in 0.0..=1.0f64,
        a in 0.1..10.0f64,
        b in 0.1..10.0f64,
    ) {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        let vlo = regularized_incomplete_beta(lo, a, b).unwrap();
        let vhi = regularized_incomplete_beta(hi, a, b).unwrap();
        prop_assert!(vlo <= vhi + 1e-13);
    }

    #[test]
    fn phi_complement(z in -8.0..8.0f64) {
        let s = std_normal_cdf(z).unwrap() + std_normal_cdf(-z).unwrap();
        prop_assert!((s - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn cholesky_round_trip_on_random_spd(
        n in 1usize..=6,
        seed in 0u64..1000,
    ) {
        // A Aᵀ + 0.1 I is SPD; reconstruction must hold to 1e-9 relative.
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, next());
            }
        }
        let mut m = a.mat_mul(&a.transpose()).unwrap();
        m.add_ridge(0.1);
        let l = cholesky(&m).unwrap();
        let back = l.mat_mul(&l.transpose()).unwrap();
        let scale = m.max_abs();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(
                    (back.get(i, j) - m.get(i, j)).abs() <= 1e-9 * scale,
                    "entry ({i},{j}): {} vs {}",
                    back.get(i, j),
                    m.get(i, j)
                );
            }
        }
    }

    #[test]
    fn empirical_auc_equals_bruteforce_and_complements(
        raw in prop::collection::vec((0i8..=20, prop::bool::ANY), 4..60),
    ) {
        // Quantized scores produce frequent ties.
        let scores: Vec<f64> = raw.iter().map(|(q, _)| *q as f64 / 4.0).collect();
        let labels: Vec<ClassLabel> = raw
            .iter()
            .map(|(_, c)| if *c { ClassLabel::Class2 } else { ClassLabel::Class1 })
            .collect();
        let n2 = labels.iter().filter(|&&l| l == ClassLabel::Class2).count();
        prop_assume!(n2 > 0 && n2 < labels.len());

        let fast = empirical_auc(&scores, &labels).unwrap();
        // O(n²) oracle
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            if li != ClassLabel::Class1 { continue; }
            for (j, &lj) in labels.iter().enumerate() {
                if lj != ClassLabel::Class2 { continue; }
                pairs += 1.0;
                if scores[j] > scores[i] { wins += 1.0; }
                else if scores[j] == scores[i] { wins += 0.5; }
            }
        }
        prop_assert!((fast - wins / pairs).abs() <= 1e-12);

        let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
        let rev = empirical_auc(&negated, &labels).unwrap();
        prop_assert!((fast + rev - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cbauc_bounded_antisymmetric_scale_invariant(
        seed in 0u64..500,
        n1 in 2usize..12,
        n2 in 2usize..12,
        scale in 0.1..50.0f64,
    ) {
        let mut stream = bauc::numerics::derive_stream(seed, 0);
        let p = 3;
        let eye = DenseMatrix::identity(p);
        let c1 = bauc::numerics::sample_mvn(&mut stream, &DenseVector::zeros(p), &eye, n1).unwrap();
        let c2 = bauc::numerics::sample_mvn(&mut stream, &DenseVector::constant(p, 0.8), &eye, n2).unwrap();
        let ds = Dataset::from_class_samples(&c1, &c2).unwrap();
        let post = posterior_update(&PriorHyperparams::default_for(p), &sample_moments(&ds).unwrap()).unwrap();

        let w = DenseVector::new(vec![
            stream.standard_normal(),
            stream.standard_normal(),
            stream.standard_normal(),
        ]).unwrap();
        prop_assume!(w.norm() > 1e-6);

        let value = cbauc(&LinearModel::new(w.clone(), 0.3), &post).unwrap();
        prop_assert!((0.0..=1.0).contains(&value));

        let negated = cbauc(&LinearModel::new(w.scale(-1.0), 0.0), &post).unwrap();
        prop_assert!((value + negated - 1.0).abs() <= 1e-12);

        let scaled = cbauc(&LinearModel::new(w.scale(scale), -2.0), &post).unwrap();
        prop_assert!((scaled - value).abs() <= 1e-10);
    }
}
