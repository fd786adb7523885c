//! Deterministic training of the linear classifiers under evaluation.
//!
//! The logistic-regression trainer is a full-batch Newton method with
//! backtracking (Armijo) line search and a gradient-step fallback when
//! the Hessian solve fails. Training always starts from zero, so a given
//! dataset and configuration produce bitwise-identical models.

use crate::bayes::{ClassMoments, LinearModel};
use crate::dataset::{ClassLabel, Dataset};
use crate::numerics::{DenseMatrix, DenseVector};
use crate::{Error, Result};

/// L2-regularized logistic regression settings. `lambda` penalizes the
/// weights only; the intercept is unpenalized (the LIBLINEAR
/// convention, with `lambda` the inverse of its `C`).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogRegConfig {
    pub lambda: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            lambda: 1.0,
            max_iters: 100,
            tol: 1e-8,
        }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "lambda must be nonnegative, got {}",
                self.lambda
            )));
        }
        if self.tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// ln(1 + exp(u)) without overflow.
#[inline]
fn log1p_exp(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

/// Logistic sigmoid.
#[inline]
fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Objective, gradient and Hessian of
/// J(w, b) = lambda/2 ||w||² + Σ_i ln(1 + exp(-y_i (w·x_i + b))),
/// y ∈ {-1, +1} with class 2 mapped to +1. The parameter vector is
/// (w, b) stacked, dimension P + 1.
struct LogRegProblem<'a> {
    dataset: &'a Dataset,
    targets: Vec<f64>,
    lambda: f64,
}

impl LogRegProblem<'_> {
    fn objective(&self, theta: &[f64]) -> f64 {
        let p = self.dataset.dim();
        let mut j = 0.5 * self.lambda * theta[..p].iter().map(|v| v * v).sum::<f64>();
        for (i, &y) in self.targets.iter().enumerate() {
            let z = score(theta, self.dataset.row(i));
            j += log1p_exp(-y * z);
        }
        j
    }

    fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let p = self.dataset.dim();
        let mut g = vec![0.0; p + 1];
        for (gi, ti) in g[..p].iter_mut().zip(&theta[..p]) {
            *gi = self.lambda * ti;
        }
        for (i, &y) in self.targets.iter().enumerate() {
            let row = self.dataset.row(i);
            let z = score(theta, row);
            // d/dz ln(1+exp(-yz)) = -y sigmoid(-yz)
            let r = -y * sigmoid(-y * z);
            for (gj, xj) in g[..p].iter_mut().zip(row) {
                *gj += r * xj;
            }
            g[p] += r;
        }
        g
    }

    fn hessian(&self, theta: &[f64]) -> DenseMatrix {
        let p = self.dataset.dim();
        let mut h = DenseMatrix::zeros(p + 1, p + 1);
        for i in 0..p {
            h.set(i, i, self.lambda);
        }
        for (i, &y) in self.targets.iter().enumerate() {
            let row = self.dataset.row(i);
            let z = score(theta, row);
            let s = sigmoid(y * z);
            let d = s * (1.0 - s);
            if d == 0.0 {
                continue;
            }
            for a in 0..p {
                let da = d * row[a];
                for b in a..p {
                    let v = h.get(a, b) + da * row[b];
                    h.set(a, b, v);
                }
                let v = h.get(a, p) + da;
                h.set(a, p, v);
            }
            h.set(p, p, h.get(p, p) + d);
        }
        for a in 0..=p {
            for b in (a + 1)..=p {
                h.set(b, a, h.get(a, b));
            }
        }
        h
    }
}

#[inline]
fn score(theta: &[f64], row: &[f64]) -> f64 {
    let p = row.len();
    theta[..p]
        .iter()
        .zip(row)
        .map(|(w, x)| w * x)
        .sum::<f64>()
        + theta[p]
}

/// Objective and gradient of the logistic training problem at (w, b):
/// J and (∇_w J, ∂J/∂b). Exposed so the optimizer can be checked
/// against finite differences.
pub fn logreg_objective_gradient(
    dataset: &Dataset,
    lambda: f64,
    w: &DenseVector,
    b: f64,
) -> Result<(f64, DenseVector, f64)> {
    if w.len() != dataset.dim() {
        return Err(Error::DimensionMismatch(format!(
            "weights have length {} but dataset dimension is {}",
            w.len(),
            dataset.dim()
        )));
    }
    let targets: Vec<f64> = dataset
        .labels()
        .iter()
        .map(|&l| if l == ClassLabel::Class2 { 1.0 } else { -1.0 })
        .collect();
    let problem = LogRegProblem {
        dataset,
        targets,
        lambda,
    };
    let mut theta = w.entries().to_vec();
    theta.push(b);
    let j = problem.objective(&theta);
    let mut g = problem.gradient(&theta);
    let gb = g.pop().expect("gradient has P+1 entries");
    Ok((j, DenseVector::new(g)?, gb))
}

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
/// Gradient norm (relative to max(1, |J|)) below which the full Newton
/// step is taken without line search: the objective is flat to rounding
/// there, so Armijo cannot resolve the true decrease, while the Newton
/// iteration itself is contractive.
const NEWTON_BASIN: f64 = 1e-5;

/// Trains L2-regularized logistic regression by Newton's method with
/// backtracking line search, starting from w = 0, b = 0.
///
/// Converges when ||∇J|| <= tol * max(1, |J|). Unregularized fits on
/// separable data diverge and are reported as non-convergence.
pub fn train_logreg_l2(dataset: &Dataset, config: &LogRegConfig) -> Result<LinearModel> {
    config.validate()?;
    for label in [ClassLabel::Class1, ClassLabel::Class2] {
        if dataset.count(label) == 0 {
            return Err(Error::MissingClass(label.as_u8()));
        }
    }
    let p = dataset.dim();
    let targets: Vec<f64> = dataset
        .labels()
        .iter()
        .map(|&l| if l == ClassLabel::Class2 { 1.0 } else { -1.0 })
        .collect();
    let problem = LogRegProblem {
        dataset,
        targets,
        lambda: config.lambda,
    };

    let mut theta = vec![0.0; p + 1];
    let mut j = problem.objective(&theta);
    for _ in 0..config.max_iters {
        let g = problem.gradient(&theta);
        let g_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if g_norm <= config.tol * j.abs().max(1.0) {
            let w = DenseVector::new(theta[..p].to_vec())?;
            return Ok(LinearModel::new(w, theta[p]));
        }

        let g_vec = DenseVector::new(g.clone())?;
        let (direction, newton_step) = match problem.hessian(&theta).solve_spd(&g_vec) {
            Ok(d) => (d, true),
            // Singular Hessian (fully separated data at tiny lambda):
            // fall back to a gradient step.
            Err(_) => (g_vec.scale(1.0 / g_norm.max(1.0)), false),
        };
        if newton_step && g_norm <= NEWTON_BASIN * j.abs().max(1.0) {
            for (t, d) in theta.iter_mut().zip(direction.entries()) {
                *t -= d;
            }
            j = problem.objective(&theta);
            continue;
        }
        let slope: f64 = direction
            .entries()
            .iter()
            .zip(&g)
            .map(|(d, gi)| d * gi)
            .sum();
        // Descent direction is -direction; slope = gᵀ d should be > 0.
        let slope = if slope > 0.0 { slope } else { g_norm * g_norm };

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = theta
                .iter()
                .zip(direction.entries())
                .map(|(t, d)| t - step * d)
                .collect();
            let j_trial = problem.objective(&trial);
            if j_trial <= j - ARMIJO_C * step * slope {
                theta = trial;
                j = j_trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    let g = problem.gradient(&theta);
    let g_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if g_norm <= config.tol * j.abs().max(1.0) {
        let w = DenseVector::new(theta[..p].to_vec())?;
        return Ok(LinearModel::new(w, theta[p]));
    }
    Err(Error::NonConvergence {
        iterations: config.max_iters,
        context: format!("logistic regression (gradient norm {g_norm:.3e})"),
    })
}

/// Fisher discriminant direction from class moments:
/// w = (Σ̂_pool + ridge·I)⁻¹ (μ̂2 - μ̂1), b = -w·(μ̂1 + μ̂2)/2.
///
/// With equal sample means the returned model is degenerate (w = 0);
/// check [`LinearModel::is_degenerate`] before evaluating an AUC.
pub fn lda_direction(moments: &ClassMoments, ridge: f64) -> Result<LinearModel> {
    if ridge < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "ridge must be nonnegative, got {ridge}"
        )));
    }
    let mut pooled = moments.pooled_covariance()?;
    pooled.add_ridge(ridge);
    let d = moments.mu_hat2.add_scaled(&moments.mu_hat1, -1.0)?;
    let w = pooled.solve_spd(&d).map_err(|e| match e {
        Error::NotPositiveDefinite(msg) => Error::NotPositiveDefinite(format!(
            "pooled covariance is singular; pass a positive ridge ({msg})"
        )),
        other => other,
    })?;
    let mid = moments.mu_hat1.add_scaled(&moments.mu_hat2, 1.0)?.scale(0.5);
    let b = -w.dot(&mid)?;
    Ok(LinearModel::new(w, b))
}

/// Per-sample scores w·x_i + b, in dataset order.
pub fn predict_scores(model: &LinearModel, dataset: &Dataset) -> Result<Vec<f64>> {
    if model.w.len() != dataset.dim() {
        return Err(Error::DimensionMismatch(format!(
            "model dimension {} but dataset dimension {}",
            model.w.len(),
            dataset.dim()
        )));
    }
    Ok((0..dataset.n_samples())
        .map(|i| {
            model
                .w
                .entries()
                .iter()
                .zip(dataset.row(i))
                .map(|(w, x)| w * x)
                .sum::<f64>()
                + model.b
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DenseMatrix;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn symmetric_dataset() -> Dataset {
        // class 1 at -v, class 2 at +v, v = (1, 2)
        Dataset::new(
            DenseMatrix::from_rows(4, 2, vec![-1.0, -2.0, -1.0, -2.0, 1.0, 2.0, 1.0, 2.0])
                .unwrap(),
            vec![
                ClassLabel::Class1,
                ClassLabel::Class1,
                ClassLabel::Class2,
                ClassLabel::Class2,
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn symmetric_problem_gives_zero_intercept() {
        let model = train_logreg_l2(&symmetric_dataset(), &LogRegConfig::default()).unwrap();
        assert!(model.b.abs() <= 1e-8, "intercept {}", model.b);
        // w parallel to v = (1, 2)
        let cross = model.w.get(0) * 2.0 - model.w.get(1) * 1.0;
        assert!(cross.abs() <= 1e-8, "w not parallel to v: {:?}", model.w);
        assert!(model.w.get(0) > 0.0);
    }

    #[test]
    fn label_flip_negates_model() {
        let ds = Dataset::new(
            DenseMatrix::from_rows(4, 2, vec![0.0, 0.3, 1.0, -0.2, 2.0, 0.9, 2.5, 1.4]).unwrap(),
            vec![
                ClassLabel::Class1,
                ClassLabel::Class1,
                ClassLabel::Class2,
                ClassLabel::Class2,
            ],
            None,
        )
        .unwrap();
        let flipped_labels: Vec<ClassLabel> =
            ds.labels().iter().map(|l| l.other()).collect();
        let flipped = Dataset::new(ds.features().clone(), flipped_labels, None).unwrap();
        let a = train_logreg_l2(&ds, &LogRegConfig::default()).unwrap();
        let b = train_logreg_l2(&flipped, &LogRegConfig::default()).unwrap();
        for i in 0..2 {
            approx(a.w.get(i), -b.w.get(i), 1e-7);
        }
        approx(a.b, -b.b, 1e-7);
    }

    #[test]
    fn gradient_matches_finite_differences_at_optimum() {
        let ds = Dataset::new(
            DenseMatrix::from_rows(4, 2, vec![0.1, 0.9, -0.4, 0.2, 1.2, 1.1, 0.8, -0.3])
                .unwrap(),
            vec![
                ClassLabel::Class1,
                ClassLabel::Class2,
                ClassLabel::Class1,
                ClassLabel::Class2,
            ],
            None,
        )
        .unwrap();
        let model = train_logreg_l2(&ds, &LogRegConfig::default()).unwrap();
        let problem = LogRegProblem {
            dataset: &ds,
            targets: ds
                .labels()
                .iter()
                .map(|&l| if l == ClassLabel::Class2 { 1.0 } else { -1.0 })
                .collect(),
            lambda: 1.0,
        };
        let theta = vec![model.w.get(0), model.w.get(1), model.b];
        let g = problem.gradient(&theta);
        let h = 1e-5;
        for k in 0..3 {
            let mut up = theta.clone();
            up[k] += h;
            let mut down = theta.clone();
            down[k] -= h;
            let fd = (problem.objective(&up) - problem.objective(&down)) / (2.0 * h);
            // At the optimum both sides are ~0; the FD noise floor
            // (eps*|J|/h ~ 1e-11) sets the resolution, so guard the scale.
            let scale = fd.abs().max(g[k].abs()).max(1.0);
            assert!(
                (g[k] - fd).abs() / scale <= 1e-5,
                "component {k}: analytic {} vs fd {fd}",
                g[k]
            );
        }
    }

    #[test]
    fn training_is_deterministic() {
        let ds = symmetric_dataset();
        let a = train_logreg_l2(&ds, &LogRegConfig::default()).unwrap();
        let b = train_logreg_l2(&ds, &LogRegConfig::default()).unwrap();
        assert_eq!(a.w.entries(), b.w.entries());
        assert_eq!(a.b.to_bits(), b.b.to_bits());
    }

    #[test]
    fn weight_norm_shrinks_with_lambda() {
        let ds = symmetric_dataset();
        let norms: Vec<f64> = [0.1, 1.0, 10.0]
            .iter()
            .map(|&lambda| {
                train_logreg_l2(
                    &ds,
                    &LogRegConfig {
                        lambda,
                        ..Default::default()
                    },
                )
                .unwrap()
                .w
                .norm()
            })
            .collect();
        assert!(norms[0] >= norms[1] && norms[1] >= norms[2], "{norms:?}");
    }

    #[test]
    fn separable_unregularized_fit_does_not_converge() {
        let ds = symmetric_dataset();
        let config = LogRegConfig {
            lambda: 0.0,
            max_iters: 50,
            tol: 1e-8,
        };
        assert!(matches!(
            train_logreg_l2(&ds, &config),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn missing_class_is_rejected() {
        let ds = Dataset::new(
            DenseMatrix::from_rows(2, 1, vec![0.0, 1.0]).unwrap(),
            vec![ClassLabel::Class2, ClassLabel::Class2],
            None,
        )
        .unwrap();
        assert!(matches!(
            train_logreg_l2(&ds, &LogRegConfig::default()),
            Err(Error::MissingClass(1))
        ));
    }

    #[test]
    fn lda_hand_example() {
        // pooled = diag(4, 1) exactly when both classes contribute it
        let moments = ClassMoments {
            n1: 2,
            n2: 2,
            mu_hat1: DenseVector::zeros(2),
            mu_hat2: DenseVector::new(vec![2.0, 0.0]).unwrap(),
            sigma_hat1: DenseMatrix::diag(&[4.0, 1.0]),
            sigma_hat2: DenseMatrix::diag(&[4.0, 1.0]),
        };
        let model = lda_direction(&moments, 0.0).unwrap();
        approx(model.w.get(0), 0.5, 1e-12);
        approx(model.w.get(1), 0.0, 1e-12);
        approx(model.b, -0.5, 1e-12);
    }

    #[test]
    fn lda_identity_pool_returns_mean_difference() {
        let moments = ClassMoments {
            n1: 3,
            n2: 3,
            mu_hat1: DenseVector::new(vec![0.5, -0.5]).unwrap(),
            mu_hat2: DenseVector::new(vec![1.5, 1.0]).unwrap(),
            sigma_hat1: DenseMatrix::identity(2),
            sigma_hat2: DenseMatrix::identity(2),
        };
        let model = lda_direction(&moments, 0.0).unwrap();
        approx(model.w.get(0), 1.0, 1e-12);
        approx(model.w.get(1), 1.5, 1e-12);
    }

    #[test]
    fn lda_equal_means_is_degenerate() {
        let moments = ClassMoments {
            n1: 2,
            n2: 2,
            mu_hat1: DenseVector::constant(2, 0.7),
            mu_hat2: DenseVector::constant(2, 0.7),
            sigma_hat1: DenseMatrix::identity(2),
            sigma_hat2: DenseMatrix::identity(2),
        };
        let model = lda_direction(&moments, 0.0).unwrap();
        assert!(model.is_degenerate());
    }

    #[test]
    fn lda_singular_pool_reports_singularity() {
        let moments = ClassMoments {
            n1: 2,
            n2: 2,
            mu_hat1: DenseVector::zeros(2),
            mu_hat2: DenseVector::constant(2, 1.0),
            sigma_hat1: DenseMatrix::zeros(2, 2),
            sigma_hat2: DenseMatrix::zeros(2, 2),
        };
        assert!(matches!(
            lda_direction(&moments, 0.0),
            Err(Error::NotPositiveDefinite(_))
        ));
        assert!(lda_direction(&moments, 1e-3).is_ok());
    }

    #[test]
    fn scores_are_order_preserving() {
        let ds = Dataset::new(
            DenseMatrix::from_rows(3, 2, vec![1.0, 2.0, 0.0, 0.0, -1.0, 3.0]).unwrap(),
            vec![ClassLabel::Class1, ClassLabel::Class2, ClassLabel::Class1],
            None,
        )
        .unwrap();
        let model = LinearModel::new(DenseVector::new(vec![3.0, -1.0]).unwrap(), 0.5);
        let scores = predict_scores(&model, &ds).unwrap();
        assert_eq!(scores, vec![1.5, 0.5, -5.5]);

        let zero = LinearModel::new(DenseVector::zeros(2), 3.0);
        assert_eq!(predict_scores(&zero, &ds).unwrap(), vec![3.0; 3]);

        let perm = ds.subset(&[2, 0, 1]).unwrap();
        let perm_scores = predict_scores(&model, &perm).unwrap();
        assert_eq!(perm_scores, vec![-5.5, 1.5, 0.5]);
    }
}
