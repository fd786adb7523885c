//! Numerical kernel: small dense linear algebra, special functions, and
//! deterministic stream-based random sampling.
//!
//! Everything downstream (posterior updates, the closed-form AUC, the
//! Monte-Carlo oracle, the experiment harness) is built on these
//! primitives. All operations are pure; matrices and vectors are plain
//! values.

pub mod linalg;
pub mod rng;
pub mod special;

pub use linalg::{cholesky, quadratic_form, DenseMatrix, DenseVector};
pub use rng::{derive_stream, mix_seed, sample_inverse_wishart, sample_mvn, RngStream};
pub use special::{
    inverse_std_normal_cdf, log_gamma, regularized_incomplete_beta, std_normal_cdf,
};
