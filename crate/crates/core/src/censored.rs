//! Accelerated-failure-time regression with gradient-boosted trees.
//!
//! The model lives in log space: `log z = g(x) + scale·ε`. A finished
//! sample contributes the density term of its observed value, a running
//! (right-censored) sample contributes the survival term at its elapsed
//! value τ:
//!
//! ```text
//! uncensored: −log[ f((log y − g)/scale) / (y·scale) ]
//! censored:   −log[ S((log τ − g)/scale) ]
//! ```
//!
//! `f` and `S` are the standardized density and survival function of ε,
//! either the standard normal or the extreme-value (minimum Gumbel)
//! distribution with `F(z) = 1 − exp(−e^z)`.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boost::{boost, BoostParams, PointLoss};
use crate::error::{Error, Result};
use crate::normal;
use crate::tree::{RegressionTree, TreeParams};

pub const HESSIAN_FLOOR: f64 = 1e-6;

/// Largest exponent fed to `exp`, keeps gradients finite far outside the data.
const MAX_EXP_ARG: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseDistribution {
    Normal,
    Extreme,
}

impl FromStr for NoiseDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(NoiseDistribution::Normal),
            "extreme" => Ok(NoiseDistribution::Extreme),
            other => Err(Error::InvalidParam(format!("unknown distribution `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensoredSample {
    pub features: Vec<f64>,
    /// Final value when uncensored, elapsed threshold τ when censored.
    pub value: f64,
    pub censored: bool,
}

impl CensoredSample {
    pub fn finished(features: Vec<f64>, value: f64) -> Self {
        CensoredSample {
            features,
            value,
            censored: false,
        }
    }

    pub fn running(features: Vec<f64>, elapsed: f64) -> Self {
        CensoredSample {
            features,
            value: elapsed,
            censored: true,
        }
    }
}

fn check(sample: &CensoredSample, scale: f64) -> Result<()> {
    if !(sample.value > 0.0 && sample.value.is_finite()) {
        return Err(Error::InvalidParam(format!(
            "sample value must be positive, got {}",
            sample.value
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParam(format!(
            "distribution scale must be positive, got {scale}"
        )));
    }
    Ok(())
}

fn capped_exp(z: f64) -> f64 {
    z.min(MAX_EXP_ARG).exp()
}

/// Per-sample negative log-likelihood at log-space prediction `g`.
pub fn aft_nll(g: f64, sample: &CensoredSample, dist: NoiseDistribution, scale: f64) -> Result<f64> {
    check(sample, scale)?;
    Ok(nll_unchecked(g, sample.value, sample.censored, dist, scale))
}

fn nll_unchecked(g: f64, value: f64, censored: bool, dist: NoiseDistribution, scale: f64) -> f64 {
    let log_y = value.ln();
    let z = (log_y - g) / scale;
    match (dist, censored) {
        (NoiseDistribution::Normal, false) => log_y + scale.ln() - normal::ln_pdf(z),
        (NoiseDistribution::Normal, true) => -normal::ln_sf(z),
        // −log f(z) = e^z − z
        (NoiseDistribution::Extreme, false) => log_y + scale.ln() + capped_exp(z) - z,
        // −log S(z) = e^z
        (NoiseDistribution::Extreme, true) => capped_exp(z),
    }
}

/// First and second derivative of [`aft_nll`] in `g`; the second is
/// floored at [`HESSIAN_FLOOR`].
pub fn aft_grad_hess(
    g: f64,
    sample: &CensoredSample,
    dist: NoiseDistribution,
    scale: f64,
) -> Result<(f64, f64)> {
    check(sample, scale)?;
    Ok(grad_hess_unchecked(g, sample.value, sample.censored, dist, scale))
}

fn grad_hess_unchecked(
    g: f64,
    value: f64,
    censored: bool,
    dist: NoiseDistribution,
    scale: f64,
) -> (f64, f64) {
    let z = (value.ln() - g) / scale;
    let s2 = scale * scale;
    let (grad, hess) = match (dist, censored) {
        (NoiseDistribution::Normal, false) => (-z / scale, 1.0 / s2),
        (NoiseDistribution::Normal, true) => {
            let lambda = normal::hazard(z);
            (-lambda / scale, lambda * (lambda - z) / s2)
        }
        (NoiseDistribution::Extreme, false) => {
            let ez = capped_exp(z);
            ((1.0 - ez) / scale, ez / s2)
        }
        (NoiseDistribution::Extreme, true) => {
            let ez = capped_exp(z);
            (-ez / scale, ez / s2)
        }
    };
    (grad, hess.max(HESSIAN_FLOOR))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AftParams {
    pub distribution: NoiseDistribution,
    pub distribution_scale: f64,
    pub learning_rate: f64,
    pub num_boost_round: usize,
    pub max_depth: usize,
    /// Minimum hessian sum per child. Keeps a lone sample with a weak
    /// likelihood signal, such as a running sample far below its predicted
    /// value, from getting a leaf of its own.
    pub min_child_weight: f64,
    /// Initial log-space prediction; `None` uses the mean log of the
    /// uncensored values (or of the thresholds when none are finished).
    pub base_score: Option<f64>,
}

impl Default for AftParams {
    fn default() -> Self {
        AftParams {
            distribution: NoiseDistribution::Extreme,
            distribution_scale: 0.3,
            learning_rate: 0.25,
            num_boost_round: 20,
            max_depth: 3,
            min_child_weight: 1.0,
            base_score: None,
        }
    }
}

impl AftParams {
    fn validate(&self) -> Result<()> {
        if !(self.distribution_scale > 0.0 && self.distribution_scale.is_finite()) {
            return Err(Error::InvalidParam("distribution_scale must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParam("learning_rate must be positive".into()));
        }
        if self.num_boost_round == 0 {
            return Err(Error::InvalidParam("num_boost_round must be at least 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidParam("max_depth must be at least 1".into()));
        }
        if !(self.min_child_weight >= 0.0 && self.min_child_weight.is_finite()) {
            return Err(Error::InvalidParam(
                "min_child_weight must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Candidate values for hyperparameter selection.
#[derive(Debug, Clone, PartialEq)]
pub struct AftGrid {
    pub scales: Vec<f64>,
    pub learning_rates: Vec<f64>,
    /// Selection runs only with at least this many uncensored samples.
    pub min_uncensored: usize,
    pub max_folds: usize,
}

impl Default for AftGrid {
    fn default() -> Self {
        AftGrid {
            scales: vec![0.2, 0.3, 0.4],
            learning_rates: vec![0.2, 0.25, 0.3],
            min_uncensored: 4,
            max_folds: 5,
        }
    }
}

impl AftGrid {
    fn midpoint(values: &[f64]) -> f64 {
        values[values.len() / 2]
    }
}

#[derive(Debug, Clone)]
pub struct AftModel {
    pub base_score: f64,
    trees: Vec<RegressionTree>,
    pub params: AftParams,
    dim: usize,
    /// Training NLL after the base score and after every round.
    pub loss_trace: Vec<f64>,
}

impl AftModel {
    /// A model with no trees.
    pub fn constant(base_score: f64, params: AftParams, dim: usize) -> Self {
        AftModel {
            base_score,
            trees: Vec::new(),
            params,
            dim,
            loss_trace: Vec::new(),
        }
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Log-space prediction g(x).
    pub fn predict_log(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>())
    }

    /// Predicted final behavior in original units, `exp(g(x))`.
    pub fn predict_final(&self, x: &[f64]) -> Result<f64> {
        Ok(self.predict_log(x)?.exp())
    }
}

struct AftLoss<'a> {
    samples: &'a [&'a CensoredSample],
    dist: NoiseDistribution,
    scale: f64,
}

impl PointLoss for AftLoss<'_> {
    fn n_samples(&self) -> usize {
        self.samples.len()
    }

    /// NLL without the `log y` Jacobian of uncensored samples. The term does
    /// not depend on `g`, and leaving it out keeps the line search's
    /// comparisons free of a units-dependent offset.
    fn loss(&self, i: usize, g: f64) -> f64 {
        let s = self.samples[i];
        let nll = nll_unchecked(g, s.value, s.censored, self.dist, self.scale);
        if s.censored {
            nll
        } else {
            nll - s.value.ln()
        }
    }

    fn grad_hess(&self, i: usize, g: f64) -> (f64, f64) {
        let s = self.samples[i];
        grad_hess_unchecked(g, s.value, s.censored, self.dist, self.scale)
    }
}

fn default_base_score(samples: &[&CensoredSample]) -> f64 {
    let mean_log = |it: &mut dyn Iterator<Item = &&CensoredSample>| {
        let (sum, n) = it.fold((0.0, 0usize), |(s, n), c| (s + c.value.ln(), n + 1));
        (n > 0).then(|| sum / n as f64)
    };
    mean_log(&mut samples.iter().filter(|s| !s.censored))
        .or_else(|| mean_log(&mut samples.iter()))
        .expect("non-empty training set")
}

fn fit_refs(samples: &[&CensoredSample], params: &AftParams) -> Result<AftModel> {
    params.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let dim = samples[0].features.len();
    for s in samples {
        check(s, params.distribution_scale)?;
        if s.features.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.features.len(),
            });
        }
    }
    let base_score = params.base_score.unwrap_or_else(|| default_base_score(samples));
    let x: Vec<&[f64]> = samples.iter().map(|s| s.features.as_slice()).collect();
    let loss = AftLoss {
        samples,
        dist: params.distribution,
        scale: params.distribution_scale,
    };
    let ensemble = boost(
        &x,
        &loss,
        base_score,
        &BoostParams {
            learning_rate: params.learning_rate,
            rounds: params.num_boost_round,
            tree: TreeParams {
                max_depth: params.max_depth,
                min_samples_leaf: 1,
                min_child_weight: params.min_child_weight,
            },
        },
    );
    Ok(AftModel {
        base_score,
        trees: ensemble.trees,
        params: *params,
        dim,
        loss_trace: ensemble.loss_trace,
    })
}

/// Fits the censored regressor on finished samples plus running ones.
pub fn fit_censored(
    uncensored: &[CensoredSample],
    censored: &[CensoredSample],
    params: &AftParams,
) -> Result<AftModel> {
    if uncensored.iter().any(|s| s.censored) || censored.iter().any(|s| !s.censored) {
        return Err(Error::InvalidParam(
            "sample censoring flags do not match their list".into(),
        ));
    }
    let all: Vec<&CensoredSample> = uncensored.iter().chain(censored).collect();
    fit_refs(&all, params)
}

/// Chooses `distribution_scale` and `learning_rate` from `grid` by the
/// held-out NLL of uncensored samples (leave-one-out up to
/// `grid.max_folds` samples, k-fold beyond), then refits on everything.
/// With fewer than `grid.min_uncensored` finished samples the grid
/// midpoints are used. Running samples stay in every training fold.
pub fn fit_censored_cv(
    uncensored: &[CensoredSample],
    censored: &[CensoredSample],
    params: &AftParams,
    grid: &AftGrid,
    seed: u64,
) -> Result<AftModel> {
    let chosen = select_hyperparams(uncensored, censored, params, grid, seed)?;
    fit_censored(uncensored, censored, &chosen)
}

pub fn select_hyperparams(
    uncensored: &[CensoredSample],
    censored: &[CensoredSample],
    params: &AftParams,
    grid: &AftGrid,
    seed: u64,
) -> Result<AftParams> {
    if grid.scales.is_empty() || grid.learning_rates.is_empty() {
        return Err(Error::InvalidParam("empty hyperparameter grid".into()));
    }
    let n = uncensored.len();
    if n < grid.min_uncensored.max(2) {
        return Ok(AftParams {
            distribution_scale: AftGrid::midpoint(&grid.scales),
            learning_rate: AftGrid::midpoint(&grid.learning_rates),
            ..*params
        });
    }

    let folds = n.min(grid.max_folds.max(2));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold_of[i] = pos % folds;
    }

    let mut best: Option<(f64, AftParams)> = None;
    for &scale in &grid.scales {
        for &rate in &grid.learning_rates {
            let candidate = AftParams {
                distribution_scale: scale,
                learning_rate: rate,
                ..*params
            };
            let mut held_out = 0.0;
            for fold in 0..folds {
                let train: Vec<&CensoredSample> = uncensored
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| fold_of[*i] != fold)
                    .map(|(_, s)| s)
                    .chain(censored)
                    .collect();
                let model = fit_refs(&train, &candidate)?;
                for (i, s) in uncensored.iter().enumerate() {
                    if fold_of[i] == fold {
                        let g = model.predict_log(&s.features)?;
                        // The log-value Jacobian is the same for every candidate;
                        // dropping it keeps the comparison independent of units.
                        held_out +=
                            nll_unchecked(g, s.value, false, params.distribution, scale) - s.value.ln();
                    }
                }
            }
            if best.as_ref().is_none_or(|(b, _)| held_out < *b) {
                best = Some((held_out, candidate));
            }
        }
    }
    Ok(best.expect("grid is non-empty").1)
}
