//! Random-forest surrogate.
//!
//! Each tree is a least-squares CART grown on a bootstrap resample. The
//! forest's mean is the average of the per-tree predictions and its
//! uncertainty the population standard deviation across trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed::mix_seed;
use crate::tree::{RegressionTree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Resample size as a fraction of the training set, drawn with replacement.
    pub bootstrap_fraction: f64,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 12,
            min_samples_leaf: 1,
            bootstrap_fraction: 1.0,
            seed: 0,
        }
    }
}

impl ForestParams {
    fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidParam("n_trees must be at least 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidParam("max_depth must be at least 1".into()));
        }
        if !(self.bootstrap_fraction > 0.0 && self.bootstrap_fraction <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "bootstrap_fraction must be in (0, 1], got {}",
                self.bootstrap_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ForestModel {
    trees: Vec<RegressionTree>,
    dim: usize,
}

impl ForestModel {
    pub fn from_trees(trees: Vec<RegressionTree>, dim: usize) -> Self {
        assert!(!trees.is_empty());
        ForestModel { trees, dim }
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tree_predictions(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.trees.iter().map(|t| t.predict(x)).collect())
    }

    pub fn predict_mean_std(&self, x: &[f64]) -> Result<(f64, f64)> {
        Ok(mean_std(&self.tree_predictions(x)?))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Arithmetic mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.iter().all(|v| *v == values[0]) {
        return (values[0], 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}

pub fn fit_forest(x: &[Vec<f64>], y: &[f64], params: &ForestParams) -> Result<ForestModel> {
    params.validate()?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(Error::InvalidParam(format!(
            "{} feature rows but {} responses",
            x.len(),
            y.len()
        )));
    }
    let dim = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: row.len(),
        });
    }

    let n = x.len();
    let sample_size = ((params.bootstrap_fraction * n as f64).round() as usize).max(1);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
        ..TreeParams::default()
    };
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(params.seed, t as u64));
            let idx: Vec<usize> = (0..sample_size).map(|_| rng.gen_range(0..n)).collect();
            let xs: Vec<&[f64]> = idx.iter().map(|&i| x[i].as_slice()).collect();
            let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
            RegressionTree::fit_least_squares(&xs, &ys, tree_params)
        })
        .collect();
    Ok(ForestModel { trees, dim })
}
