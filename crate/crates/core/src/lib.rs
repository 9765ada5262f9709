//! Configuration autotuning by Bayesian optimization with predictive early
//! termination.
//!
//! A random-forest surrogate and expected improvement pick the next
//! configuration from a fixed candidate pool. While it runs, a
//! gradient-boosted accelerated-failure-time model, trained on finished
//! samples plus the running one as a right-censored observation, predicts
//! its final latency or energy; the run is killed as soon as that
//! prediction is no better than the best feasible result so far.

pub mod acquisition;
pub mod baselines;
pub mod boost;
pub mod censored;
pub mod error;
pub mod execution;
pub mod forest;
pub mod harness;
pub mod normal;
pub mod optimizer;
pub mod seed;
pub mod space;
pub mod tree;

pub use error::{Error, Result};
