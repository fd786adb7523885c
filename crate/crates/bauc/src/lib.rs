//! Closed-form Bayesian AUC (CBAUC) estimation for linear binary classifiers.
//!
//! Given only a training set, the library places a normal-inverse-Wishart
//! prior on the two Gaussian class-conditional distributions, updates it to
//! the conjugate posterior, and evaluates the posterior expectation of the
//! area under the ROC curve in closed form through the regularized
//! incomplete beta function. No cross-validation splits or resampling are
//! required, which makes the estimate deterministic and fast.
//!
//! The crate also ships the machinery needed to check and compare that
//! estimate:
//!
//! - a Monte-Carlo posterior-integration oracle that verifies the closed
//!   form ([`bayes::mc_cbauc_oracle`]),
//! - reference estimators: stratified k-fold cross-validated AUC, an
//!   empirical Bayesian AUC that integrates a threshold-swept ROC curve,
//!   and the sample-binormal plug-in ([`estimators`], [`bayes`]),
//! - an L2-regularized logistic-regression trainer so experiments do not
//!   depend on an external solver ([`classifiers`]),
//! - a deterministic replication harness for synthetic Gaussian scenarios
//!   ([`harness`]),
//! - CSV dataset ingestion, result tables, and a minimal SVG line-chart
//!   writer ([`dataset`], [`table`], [`plot`]).
//!
//! The `bauc` binary is a thin front end over these modules; the crate's
//! `examples/` directory shows each capability as a runnable program.

pub mod bayes;
pub mod classifiers;
pub mod cli;
pub mod dataset;
pub mod estimators;
pub mod harness;
pub mod numerics;
pub mod plot;
pub mod table;

mod error;

pub use error::{Error, Result};
