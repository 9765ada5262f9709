//! Newton gradient boosting over per-sample twice-differentiable losses.

use crate::tree::{RegressionTree, TreeParams};

/// A training objective that decomposes over samples.
pub trait PointLoss {
    fn n_samples(&self) -> usize;
    fn loss(&self, i: usize, g: f64) -> f64;
    /// First and second derivative of `loss(i, ·)` at `g`.
    fn grad_hess(&self, i: usize, g: f64) -> (f64, f64);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostParams {
    pub learning_rate: f64,
    pub rounds: usize,
    pub tree: TreeParams,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub base_score: f64,
    pub trees: Vec<RegressionTree>,
    /// Total training loss after the base score and after each round.
    pub loss_trace: Vec<f64>,
}

impl Ensemble {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

const MAX_HALVINGS: usize = 40;

/// Fits `rounds` trees. Each tree's leaves are `−ΣG/ΣH` scaled by the
/// learning rate; if a step would raise the training loss its leaves are
/// halved until it does not (a zero step at worst), so the loss trace is
/// non-increasing.
pub fn boost<L: PointLoss>(x: &[&[f64]], loss: &L, base_score: f64, params: &BoostParams) -> Ensemble {
    let n = loss.n_samples();
    assert_eq!(x.len(), n);
    assert!(n > 0);
    let mut preds = vec![base_score; n];
    let total = |p: &[f64]| p.iter().enumerate().map(|(i, &g)| loss.loss(i, g)).sum::<f64>();
    let mut current = total(&preds);
    let mut loss_trace = vec![current];
    let mut trees = Vec::with_capacity(params.rounds);
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];

    for _ in 0..params.rounds {
        for i in 0..n {
            let (g, h) = loss.grad_hess(i, preds[i]);
            grad[i] = g;
            hess[i] = h;
        }
        let mut tree = RegressionTree::fit(x, &grad, &hess, params.tree);
        tree.scale_leaves(params.learning_rate);
        let mut step: Vec<f64> = x.iter().map(|r| tree.predict(r)).collect();
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = preds.iter().zip(&step).map(|(p, s)| p + s).collect();
            let value = total(&trial);
            if value <= current {
                preds = trial;
                current = value;
                accepted = true;
                break;
            }
            tree.scale_leaves(0.5);
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
        if !accepted {
            tree.scale_leaves(0.0);
        }
        trees.push(tree);
        loss_trace.push(current);
    }
    Ensemble {
        base_score,
        trees,
        loss_trace,
    }
}

/// Half squared error in raw units, `½(y − g)²`.
pub struct SquaredError<'a> {
    pub targets: &'a [f64],
}

impl PointLoss for SquaredError<'_> {
    fn n_samples(&self) -> usize {
        self.targets.len()
    }

    fn loss(&self, i: usize, g: f64) -> f64 {
        0.5 * (self.targets[i] - g).powi(2)
    }

    fn grad_hess(&self, i: usize, g: f64) -> (f64, f64) {
        (g - self.targets[i], 1.0)
    }
}

/// Ordinary least-squares gradient-boosted trees, initialized at the mean
/// response.
pub fn fit_squared_gbt(x: &[&[f64]], y: &[f64], params: &BoostParams) -> Ensemble {
    let base = y.iter().sum::<f64>() / y.len() as f64;
    boost(x, &SquaredError { targets: y }, base, params)
}
