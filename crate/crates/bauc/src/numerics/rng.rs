//! Deterministic, splittable random streams plus the two samplers the
//! estimators need: multivariate normal draws and inverse-Wishart draws.
//!
//! Streams are ChaCha12 counter-based generators: `(master_seed,
//! stream_id)` fully determines the sequence, so replications can run on
//! any number of threads without changing results. A stream is
//! single-owner; derive one per task instead of sharing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use super::linalg::{cholesky, DenseMatrix, DenseVector};
use crate::{Error, Result};

/// Deterministic random stream identified by `(master_seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha12Rng,
    stream_id: u64,
}

/// Derives the stream for `(master_seed, stream_id)`.
///
/// Identical arguments produce bitwise-identical sequences; distinct
/// stream ids under one master seed produce independent sequences.
pub fn derive_stream(master_seed: u64, stream_id: u64) -> RngStream {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    RngStream { rng, stream_id }
}

/// SplitMix64 finalizer; used to spread scenario indices into
/// well-separated master seeds.
pub fn mix_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// One standard normal draw.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform draw from `[0, bound)`.
    pub fn uniform_index(&mut self, bound: usize) -> usize {
        self.rng.random_range(0..bound)
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, data: &mut [T]) {
        for i in (1..data.len()).rev() {
            let j = self.rng.random_range(0..=i);
            data.swap(i, j);
        }
    }
}

/// Draws `n` samples from N(mean, L Lᵀ) given the Cholesky-like factor
/// `L` of the covariance: each sample is `mean + L z` with `z` i.i.d.
/// standard normal.
pub fn sample_mvn(
    stream: &mut RngStream,
    mean: &DenseVector,
    cov_chol: &DenseMatrix,
    n: usize,
) -> Result<Vec<DenseVector>> {
    let p = mean.len();
    if !cov_chol.is_square() || cov_chol.rows() != p {
        return Err(Error::DimensionMismatch(format!(
            "mvn factor is {}x{}, mean has length {p}",
            cov_chol.rows(),
            cov_chol.cols()
        )));
    }
    let mut out = Vec::with_capacity(n);
    let mut z = vec![0.0; p];
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = stream.standard_normal();
        }
        let mut x = Vec::with_capacity(p);
        for i in 0..p {
            let mut s = mean.get(i);
            // L is lower triangular in every caller, but the full row
            // product keeps the contract honest for general factors.
            for (j, &zj) in z.iter().enumerate() {
                s += cov_chol.get(i, j) * zj;
            }
            x.push(s);
        }
        out.push(DenseVector::new(x)?);
    }
    Ok(out)
}

/// Draws `n` matrices from InverseWishart(S, kappa) under the density
/// p(Σ) ∝ det(Σ)^{-(kappa+P+1)/2} exp(-tr(S Σ⁻¹)/2), so that
/// E[Σ] = S / (kappa - P - 1) when kappa > P + 1.
///
/// Bartlett construction: with S = L Lᵀ and A the lower-triangular
/// Bartlett factor of a Wishart(S⁻¹, kappa) draw (sqrt-chi-square
/// diagonal, standard-normal subdiagonal), the draw is
/// Σ = (A⁻¹ Lᵀ)ᵀ (A⁻¹ Lᵀ), symmetric positive definite by construction.
pub fn sample_inverse_wishart(
    stream: &mut RngStream,
    s: &DenseMatrix,
    kappa: f64,
    n: usize,
) -> Result<Vec<DenseMatrix>> {
    let l = cholesky(s)?;
    let p = s.rows();
    if kappa <= p as f64 - 1.0 {
        return Err(Error::InvalidArgument(format!(
            "inverse-Wishart needs kappa > P - 1 (got kappa={kappa}, P={p})"
        )));
    }
    let chi: Vec<ChiSquared<f64>> = (0..p)
        .map(|i| {
            ChiSquared::new(kappa - i as f64).map_err(|e| {
                Error::InvalidArgument(format!("chi-squared dof for Bartlett factor: {e}"))
            })
        })
        .collect::<Result<_>>()?;

    let l_t = l.transpose();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut a = DenseMatrix::zeros(p, p);
        for (i, chi_i) in chi.iter().enumerate() {
            a.set(i, i, chi_i.sample(&mut stream.rng).sqrt());
        }
        for i in 1..p {
            for j in 0..i {
                a.set(i, j, stream.standard_normal());
            }
        }
        let a_inv = a.lower_triangular_inverse()?;
        let m = a_inv.mat_mul(&l_t)?;
        // Sigma = Mᵀ M, filled symmetrically from column dot products.
        let mut sigma = DenseMatrix::zeros(p, p);
        for i in 0..p {
            for j in i..p {
                let mut dot = 0.0;
                for k in 0..p {
                    dot += m.get(k, i) * m.get(k, j);
                }
                sigma.set(i, j, dot);
                sigma.set(j, i, dot);
            }
        }
        out.push(sigma);
    }
    Ok(out)
}
