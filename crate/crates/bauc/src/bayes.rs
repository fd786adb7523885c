//! Bayesian AUC machinery: normal-inverse-Wishart prior/posterior
//! hyperparameters, the closed-form posterior AUC of a linear classifier
//! (CBAUC), the threshold-sliding empirical Bayesian baseline (EBAUC),
//! binormal plug-in AUCs, and a Monte-Carlo oracle that integrates the
//! posterior directly.
//!
//! The model: both classes are Gaussian with a shared covariance. The
//! covariance carries an inverse-Wishart prior with center `S` and
//! concentration `kappa`; each class mean, conditioned on the
//! covariance, is Gaussian around `m_c` with precision scaled by `nu_c`.
//! Observing data moves `(m_c, S, nu_c, kappa)` to starred posterior
//! counterparts in closed form, and the posterior expectation of the
//! AUC reduces to one evaluation of the regularized incomplete beta
//! function.

use crate::dataset::{ClassLabel, Dataset};
use crate::numerics::{
    cholesky, quadratic_form, regularized_incomplete_beta, sample_inverse_wishart,
    std_normal_cdf, DenseMatrix, DenseVector, RngStream,
};
use crate::{Error, Result};

/// Normal-inverse-Wishart prior hyperparameters.
#[derive(Debug, Clone)]
pub struct PriorHyperparams {
    /// Prior centers for the class means.
    pub m1: DenseVector,
    pub m2: DenseVector,
    /// Prior center for the covariance (SPD).
    pub s: DenseMatrix,
    /// Mean-concentration weights (> 0).
    pub nu1: f64,
    pub nu2: f64,
    /// Covariance-concentration weight.
    pub kappa: f64,
}

impl PriorHyperparams {
    /// Validating constructor.
    pub fn new(
        m1: DenseVector,
        m2: DenseVector,
        s: DenseMatrix,
        nu1: f64,
        nu2: f64,
        kappa: f64,
    ) -> Result<Self> {
        let p = m1.len();
        if m2.len() != p || s.rows() != p || s.cols() != p {
            return Err(Error::DimensionMismatch(
                "prior hyperparameter dimensions disagree".to_string(),
            ));
        }
        if !(nu1 > 0.0 && nu2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mean concentrations must be positive (nu1={nu1}, nu2={nu2})"
            )));
        }
        cholesky(&s)?;
        Ok(PriorHyperparams {
            m1,
            m2,
            s,
            nu1,
            nu2,
            kappa,
        })
    }

    /// The flat default used throughout the experiments:
    /// m1 = m2 = 0, S = I, nu1 = nu2 = 0.5, kappa = P + 2.
    pub fn default_for(p: usize) -> Self {
        PriorHyperparams {
            m1: DenseVector::zeros(p),
            m2: DenseVector::zeros(p),
            s: DenseMatrix::identity(p),
            nu1: 0.5,
            nu2: 0.5,
            kappa: p as f64 + 2.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.m1.len()
    }
}

/// Per-class sample counts, means and covariances (divisor n_c - 1;
/// single-sample classes get a zero covariance).
#[derive(Debug, Clone)]
pub struct ClassMoments {
    pub n1: usize,
    pub n2: usize,
    pub mu_hat1: DenseVector,
    pub mu_hat2: DenseVector,
    pub sigma_hat1: DenseMatrix,
    pub sigma_hat2: DenseMatrix,
}

impl ClassMoments {
    pub fn dim(&self) -> usize {
        self.mu_hat1.len()
    }

    /// Pooled covariance [(n1-1) Σ̂1 + (n2-1) Σ̂2] / (n1 + n2 - 2).
    pub fn pooled_covariance(&self) -> Result<DenseMatrix> {
        if self.n1 + self.n2 < 3 {
            return Err(Error::InsufficientSamples(format!(
                "pooled covariance needs n1 + n2 >= 3, got {}",
                self.n1 + self.n2
            )));
        }
        let denom = (self.n1 + self.n2 - 2) as f64;
        self.sigma_hat1
            .scale((self.n1 as f64 - 1.0) / denom)
            .add_scaled(&self.sigma_hat2, (self.n2 as f64 - 1.0) / denom)
    }
}

/// Posterior hyperparameters after a conjugate update.
#[derive(Debug, Clone)]
pub struct PosteriorHyperparams {
    pub m1_star: DenseVector,
    pub m2_star: DenseVector,
    pub s_star: DenseMatrix,
    pub nu1_star: f64,
    pub nu2_star: f64,
    pub kappa_star: f64,
}

impl PosteriorHyperparams {
    pub fn dim(&self) -> usize {
        self.m1_star.len()
    }

    /// Second beta parameter of the closed form, (kappa* - P + 1) / 2.
    fn beta_b(&self) -> Result<f64> {
        let b = (self.kappa_star - self.dim() as f64 + 1.0) / 2.0;
        if b <= 0.0 {
            return Err(Error::Configuration(format!(
                "kappa* - P + 1 must be positive for the closed form (kappa*={}, P={})",
                self.kappa_star,
                self.dim()
            )));
        }
        Ok(b)
    }
}

/// Linear classifier `x -> w·x + b`; predicts class 2 when the score is
/// positive. The intercept is carried for scoring but never enters an
/// AUC (ranking is threshold-free).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub w: DenseVector,
    pub b: f64,
}

impl LinearModel {
    pub fn new(w: DenseVector, b: f64) -> Self {
        LinearModel { w, b }
    }

    /// True when the weight vector is identically zero, in which case
    /// the score direction (and any AUC of it) is undefined.
    pub fn is_degenerate(&self) -> bool {
        self.w.is_zero()
    }
}

/// True class-conditional Gaussian parameters for synthetic ground
/// truth. The covariances may differ (the robustness scenario).
#[derive(Debug, Clone)]
pub struct GaussianPopulation {
    pub mu1: DenseVector,
    pub mu2: DenseVector,
    pub sigma1: DenseMatrix,
    pub sigma2: DenseMatrix,
}

impl GaussianPopulation {
    pub fn new(
        mu1: DenseVector,
        mu2: DenseVector,
        sigma1: DenseMatrix,
        sigma2: DenseMatrix,
    ) -> Result<Self> {
        let p = mu1.len();
        if mu2.len() != p
            || sigma1.rows() != p
            || sigma1.cols() != p
            || sigma2.rows() != p
            || sigma2.cols() != p
        {
            return Err(Error::DimensionMismatch(
                "population parameter dimensions disagree".to_string(),
            ));
        }
        cholesky(&sigma1)?;
        cholesky(&sigma2)?;
        Ok(GaussianPopulation {
            mu1,
            mu2,
            sigma1,
            sigma2,
        })
    }

    /// Shared-covariance population.
    pub fn equal_cov(mu1: DenseVector, mu2: DenseVector, sigma: DenseMatrix) -> Result<Self> {
        GaussianPopulation::new(mu1, mu2, sigma.clone(), sigma)
    }

    pub fn dim(&self) -> usize {
        self.mu1.len()
    }

    pub fn has_equal_covariances(&self) -> bool {
        let scale = self.sigma1.max_abs().max(self.sigma2.max_abs()).max(1.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if (self.sigma1.get(i, j) - self.sigma2.get(i, j)).abs() > 1e-12 * scale {
                    return false;
                }
            }
        }
        true
    }
}

/// Per-class sample means and covariances of a dataset.
pub fn sample_moments(dataset: &Dataset) -> Result<ClassMoments> {
    let p = dataset.dim();
    let mut per_class = Vec::with_capacity(2);
    for label in [ClassLabel::Class1, ClassLabel::Class2] {
        let idx = dataset.class_indices(label);
        if idx.is_empty() {
            return Err(Error::MissingClass(label.as_u8()));
        }
        let n = idx.len();
        let mut mean = vec![0.0; p];
        for &i in &idx {
            for (j, m) in mean.iter_mut().enumerate() {
                *m += dataset.features().get(i, j);
            }
        }
        for m in mean.iter_mut() {
            *m /= n as f64;
        }
        let mut cov = DenseMatrix::zeros(p, p);
        if n >= 2 {
            for &i in &idx {
                for a in 0..p {
                    let da = dataset.features().get(i, a) - mean[a];
                    for b in a..p {
                        let db = dataset.features().get(i, b) - mean[b];
                        let v = cov.get(a, b) + da * db;
                        cov.set(a, b, v);
                    }
                }
            }
            for a in 0..p {
                for b in a..p {
                    let v = cov.get(a, b) / (n as f64 - 1.0);
                    cov.set(a, b, v);
                    cov.set(b, a, v);
                }
            }
        }
        per_class.push((n, DenseVector::new(mean)?, cov));
    }
    let (n2, mu_hat2, sigma_hat2) = per_class.pop().expect("two classes pushed");
    let (n1, mu_hat1, sigma_hat1) = per_class.pop().expect("two classes pushed");
    Ok(ClassMoments {
        n1,
        n2,
        mu_hat1,
        mu_hat2,
        sigma_hat1,
        sigma_hat2,
    })
}

/// Conjugate posterior update:
///
/// kappa* = kappa + n,  nu_c* = nu_c + n_c,
/// m_c*   = (n_c μ̂_c + nu_c m_c) / (n_c + nu_c),
/// S*     = (n1-1) Σ̂1 + (n2-1) Σ̂2 + S
///          + Σ_c [n_c nu_c / (n_c + nu_c)] (μ̂_c - m_c)(μ̂_c - m_c)ᵀ.
pub fn posterior_update(
    prior: &PriorHyperparams,
    moments: &ClassMoments,
) -> Result<PosteriorHyperparams> {
    let p = prior.dim();
    if moments.dim() != p {
        return Err(Error::DimensionMismatch(format!(
            "prior dimension {p} but moments dimension {}",
            moments.dim()
        )));
    }
    let n1 = moments.n1 as f64;
    let n2 = moments.n2 as f64;

    let nu1_star = prior.nu1 + n1;
    let nu2_star = prior.nu2 + n2;
    let kappa_star = prior.kappa + n1 + n2;

    let m1_star = moments
        .mu_hat1
        .scale(n1 / (n1 + prior.nu1))
        .add_scaled(&prior.m1, prior.nu1 / (n1 + prior.nu1))?;
    let m2_star = moments
        .mu_hat2
        .scale(n2 / (n2 + prior.nu2))
        .add_scaled(&prior.m2, prior.nu2 / (n2 + prior.nu2))?;

    let mut s_star = prior
        .s
        .add_scaled(&moments.sigma_hat1, n1 - 1.0)?
        .add_scaled(&moments.sigma_hat2, n2 - 1.0)?;
    let d1 = moments.mu_hat1.add_scaled(&prior.m1, -1.0)?;
    s_star.add_outer(&d1, n1 * prior.nu1 / (n1 + prior.nu1))?;
    let d2 = moments.mu_hat2.add_scaled(&prior.m2, -1.0)?;
    s_star.add_outer(&d2, n2 * prior.nu2 / (n2 + prior.nu2))?;

    Ok(PosteriorHyperparams {
        m1_star,
        m2_star,
        s_star,
        nu1_star,
        nu2_star,
        kappa_star,
    })
}

/// Shared tail kernel: 1/2 + sgn(a)/2 * I(a² / (a² + q); 1/2, beta_b)
/// with q = wᵀ S* w. Exactly 1/2 when a = 0.
fn beta_tail(a: f64, q: f64, beta_b: f64) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.5);
    }
    if !(q > 0.0) {
        return Err(Error::Configuration(format!(
            "quadratic form wᵀS*w must be positive, got {q}"
        )));
    }
    let x = a * a / (a * a + q);
    let i = regularized_incomplete_beta(x, 0.5, beta_b)?;
    Ok(0.5 + 0.5 * a.signum() * i)
}

/// Closed-form Bayesian AUC of a linear classifier under the posterior.
///
/// CBAUC = 1/2 + sgn(A*)/2 * I(A*² / (A*² + wᵀS*w); 1/2, (kappa*-P+1)/2)
/// with A* = wᵀ(m2* - m1*) √(nu1* nu2*) / √(nu1* + nu2* + 2 nu1* nu2*).
/// The intercept plays no role.
pub fn cbauc(model: &LinearModel, post: &PosteriorHyperparams) -> Result<f64> {
    if model.is_degenerate() {
        return Err(Error::ZeroWeights);
    }
    if model.w.len() != post.dim() {
        return Err(Error::DimensionMismatch(format!(
            "weights have length {}, posterior dimension {}",
            model.w.len(),
            post.dim()
        )));
    }
    let beta_b = post.beta_b()?;
    let delta = model.w.dot(&post.m2_star)? - model.w.dot(&post.m1_star)?;
    let nu1 = post.nu1_star;
    let nu2 = post.nu2_star;
    let a_star = delta * (nu1 * nu2).sqrt() / (nu1 + nu2 + 2.0 * nu1 * nu2).sqrt();
    let q = quadratic_form(&model.w, &post.s_star)?;
    beta_tail(a_star, q, beta_b)
}

/// Population AUC of a linear classifier at known Gaussian parameters:
/// Φ( wᵀ(μ2 - μ1) / √(wᵀΣ1w + wᵀΣ2w) ), which reduces to the
/// equal-covariance form Φ( wᵀ(μ2-μ1) / √(2 wᵀΣw) ) when Σ1 = Σ2.
pub fn population_auc(model: &LinearModel, pop: &GaussianPopulation) -> Result<f64> {
    if model.is_degenerate() {
        return Err(Error::ZeroWeights);
    }
    if model.w.len() != pop.dim() {
        return Err(Error::DimensionMismatch(
            "weights and population dimensions disagree".to_string(),
        ));
    }
    let delta = model.w.dot(&pop.mu2)? - model.w.dot(&pop.mu1)?;
    let denom = quadratic_form(&model.w, &pop.sigma1)? + quadratic_form(&model.w, &pop.sigma2)?;
    if !(denom > 0.0) {
        return Err(Error::Configuration(format!(
            "score variance must be positive, got {denom}"
        )));
    }
    std_normal_cdf(delta / denom.sqrt())
}

/// AUC of the optimal linear classifier for an equal-covariance
/// Gaussian pair: Φ(Δ/√2) with Δ the Mahalanobis distance between the
/// class means. Equals `population_auc` at w = Σ⁻¹(μ2 - μ1).
pub fn bayes_optimal_auc(pop: &GaussianPopulation) -> Result<f64> {
    if !pop.has_equal_covariances() {
        return Err(Error::Configuration(
            "optimal AUC requires equal class covariances (the optimal classifier is not \
             linear otherwise)"
            .to_string(),
        ));
    }
    let d = pop.mu2.add_scaled(&pop.mu1, -1.0)?;
    if d.is_zero() {
        return Ok(0.5);
    }
    let x = pop.sigma1.solve_spd(&d)?;
    let delta_sq = d.dot(&x)?;
    std_normal_cdf((delta_sq / 2.0).sqrt())
}

/// Ridge added to a pooled covariance whose projected variance
/// underflows, so degenerate samples still produce a value.
const BINORMAL_RIDGE: f64 = 1e-8;

/// Binormal plug-in AUC from sample moments: sample means and the
/// pooled sample covariance substituted into the equal-covariance
/// population formula.
pub fn sample_binormal_auc(model: &LinearModel, moments: &ClassMoments) -> Result<f64> {
    if model.is_degenerate() {
        return Err(Error::ZeroWeights);
    }
    if model.w.len() != moments.dim() {
        return Err(Error::DimensionMismatch(
            "weights and moments dimensions disagree".to_string(),
        ));
    }
    let mut pooled = moments.pooled_covariance()?;
    let w_norm_sq = model.w.dot(&model.w)?;
    let mut q = quadratic_form(&model.w, &pooled)?;
    if q <= 1e-12 * w_norm_sq {
        pooled.add_ridge(BINORMAL_RIDGE);
        q = quadratic_form(&model.w, &pooled)?;
    }
    let delta = model.w.dot(&moments.mu_hat2)? - model.w.dot(&moments.mu_hat1)?;
    std_normal_cdf(delta / (2.0 * q).sqrt())
}

/// Posterior probability that a class-`label` score w·x exceeds `t`.
///
/// Conditional on the class parameters this is Φ((wᵀμ_c - t)/√(wᵀΣw));
/// integrating the mean and then the covariance out of the posterior
/// collapses it to the same beta tail as the closed-form AUC, with
/// A_c = (wᵀm_c* - t) √(nu_c*/(nu_c* + 1)).
pub fn bayes_exceedance(
    post: &PosteriorHyperparams,
    label: ClassLabel,
    w: &DenseVector,
    t: f64,
) -> Result<f64> {
    if w.is_zero() {
        return Err(Error::ZeroWeights);
    }
    if w.len() != post.dim() {
        return Err(Error::DimensionMismatch(
            "weights and posterior dimensions disagree".to_string(),
        ));
    }
    let beta_b = post.beta_b()?;
    let (m_star, nu_star) = match label {
        ClassLabel::Class1 => (&post.m1_star, post.nu1_star),
        ClassLabel::Class2 => (&post.m2_star, post.nu2_star),
    };
    let a = (w.dot(m_star)? - t) * (nu_star / (nu_star + 1.0)).sqrt();
    let q = quadratic_form(w, &post.s_star)?;
    beta_tail(a, q, beta_b)
}

/// Empirical Bayesian AUC: posterior TPR/FPR on a sliding threshold
/// grid, integrated by the trapezoid rule.
///
/// The grid spans [c - 8s, c + 8s] around the midpoint c of the two
/// posterior score centers, with s one posterior score standard
/// deviation plus half the center separation; the clipped tail area is
/// below 1e-10. The endpoints (FPR,TPR) = (1,1) and (0,0) are added
/// explicitly.
pub fn ebauc(w: &DenseVector, post: &PosteriorHyperparams, grid_size: usize) -> Result<f64> {
    if grid_size < 3 {
        return Err(Error::InvalidArgument(format!(
            "ebauc needs grid_size >= 3, got {grid_size}"
        )));
    }
    if w.is_zero() {
        return Err(Error::ZeroWeights);
    }
    let s1 = w.dot(&post.m1_star)?;
    let s2 = w.dot(&post.m2_star)?;
    let center = 0.5 * (s1 + s2);
    let q = quadratic_form(w, &post.s_star)?;
    // kappa* - P - 1 > 0 whenever the posterior mean of Sigma exists;
    // exotic priors without one fall back to the unnormalized scale.
    let denom = post.kappa_star - post.dim() as f64 - 1.0;
    let spread = (q / if denom > 0.0 { denom } else { 1.0 }).sqrt() + 0.5 * (s2 - s1).abs();
    let lo = center - 8.0 * spread;
    let hi = center + 8.0 * spread;

    let mut points = Vec::with_capacity(grid_size + 2);
    points.push((1.0, 1.0));
    for k in 0..grid_size {
        let t = lo + (hi - lo) * k as f64 / (grid_size as f64 - 1.0);
        let fpr = bayes_exceedance(post, ClassLabel::Class1, w, t)?;
        let tpr = bayes_exceedance(post, ClassLabel::Class2, w, t)?;
        points.push((fpr, tpr));
    }
    points.push((0.0, 0.0));

    let mut area = 0.0;
    for pair in points.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        area += (x0 - x1) * (y0 + y1) * 0.5;
    }
    Ok(area)
}

/// Monte-Carlo evaluation of the posterior AUC integral: draws
/// Σ ~ InverseWishart(S*, kappa*) and μ_c ~ N(m_c*, Σ/nu_c*), evaluates
/// the population AUC exactly for each draw, and returns the sample
/// mean and its standard error. The closed form should agree within a
/// few standard errors; this is the independent check of the algebra.
pub fn mc_cbauc_oracle(
    model: &LinearModel,
    post: &PosteriorHyperparams,
    stream: &mut RngStream,
    draws: usize,
) -> Result<(f64, f64)> {
    if draws < 100 {
        return Err(Error::InvalidArgument(format!(
            "oracle needs at least 100 draws, got {draws}"
        )));
    }
    let p = post.dim();
    if post.kappa_star <= p as f64 + 1.0 {
        return Err(Error::Configuration(format!(
            "oracle needs kappa* > P + 1 (kappa*={}, P={p})",
            post.kappa_star
        )));
    }
    if model.is_degenerate() {
        return Err(Error::ZeroWeights);
    }

    let inv_sqrt_nu1 = post.nu1_star.sqrt().recip();
    let inv_sqrt_nu2 = post.nu2_star.sqrt().recip();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut count = 0.0;
    const BATCH: usize = 1024;
    let mut remaining = draws;
    while remaining > 0 {
        let take = remaining.min(BATCH);
        let sigmas = sample_inverse_wishart(stream, &post.s_star, post.kappa_star, take)?;
        for sigma in sigmas {
            let l = cholesky(&sigma)?;
            let mu1 = sample_mvn_once(stream, &post.m1_star, &l, inv_sqrt_nu1);
            let mu2 = sample_mvn_once(stream, &post.m2_star, &l, inv_sqrt_nu2);
            let delta: f64 = model
                .w
                .entries()
                .iter()
                .zip(mu2.iter().zip(&mu1))
                .map(|(wi, (a, b))| wi * (a - b))
                .sum();
            let q = quadratic_form(&model.w, &sigma)?;
            let auc = std_normal_cdf(delta / (2.0 * q).sqrt())?;
            count += 1.0;
            let d = auc - mean;
            mean += d / count;
            m2 += d * (auc - mean);
        }
        remaining -= take;
    }
    let variance = m2 / (count - 1.0);
    Ok((mean, (variance / count).sqrt()))
}

/// One draw of mean + scale * L z without vector plumbing.
fn sample_mvn_once(
    stream: &mut RngStream,
    mean: &DenseVector,
    l: &DenseMatrix,
    scale: f64,
) -> Vec<f64> {
    let p = mean.len();
    let z: Vec<f64> = (0..p).map(|_| stream.standard_normal()).collect();
    (0..p)
        .map(|i| {
            let mut s = mean.get(i);
            for j in 0..=i {
                s += scale * l.get(i, j) * z[j];
            }
            s
        })
        .collect()
}
