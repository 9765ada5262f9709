//! Expected improvement over a finite candidate pool.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forest::ForestModel;
use crate::normal;

/// Expected improvement for minimization.
///
/// Improvement is measured downward from `m_best`:
/// `EI = (m − μ)·Φ(Z) + σ·φ(Z)` with `Z = (m − μ)/σ`, and `EI = 0` when
/// `σ = 0`. This is E[max(m − Y, 0)] for Y ~ N(μ, σ²). Note the sign: the
/// objective is minimized, so the improvement term is `m − μ`, not `μ − m`.
pub fn expected_improvement(mu: f64, sigma: f64, m_best: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    let delta = m_best - mu;
    let z = delta / sigma;
    (delta * normal::cdf(z) + sigma * normal::pdf(z)).max(0.0)
}

/// What the acquisition step needs to know about the search so far.
#[derive(Debug, Clone, Copy)]
pub struct AcquisitionContext<'a> {
    pub m_best: f64,
    /// Encoded candidate pool.
    pub candidates: &'a [Vec<f64>],
    /// `sampled[i]` is set once candidate `i` has been run (finished or not).
    pub sampled: &'a [bool],
}

/// Index of the unsampled candidate with the largest EI, lowest index on ties.
pub fn select_next(model: &ForestModel, ctx: &AcquisitionContext<'_>) -> Result<usize> {
    assert_eq!(ctx.candidates.len(), ctx.sampled.len());
    let scores: Vec<Option<f64>> = ctx
        .candidates
        .par_iter()
        .zip(ctx.sampled.par_iter())
        .map(|(x, &done)| {
            if done {
                return Ok(None);
            }
            let (mu, sigma) = model.predict_mean_std(x)?;
            Ok(Some(expected_improvement(mu, sigma, ctx.m_best)))
        })
        .collect::<Result<_>>()?;
    argmax_first(&scores).ok_or(Error::CandidatesExhausted)
}

fn argmax_first(scores: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(s) = *s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::RegressionTree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// E[max(m − Y, 0)] by sampling; returns (mean, standard error).
    fn monte_carlo_ei(mu: f64, sigma: f64, m: f64, draws: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..draws {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            let gain = (m - (mu + sigma * z)).max(0.0);
            sum += gain;
            sum_sq += gain * gain;
        }
        let n = draws as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn zero_sigma_is_zero() {
        assert_eq!(expected_improvement(3.0, 0.0, 10.0), 0.0);
        assert_eq!(expected_improvement(30.0, 0.0, 10.0), 0.0);
    }

    #[test]
    fn at_the_incumbent() {
        let ei = expected_improvement(5.0, 1.0, 5.0);
        assert!((ei - 0.398_942).abs() < 1e-6);
        let (mc, se) = monte_carlo_ei(5.0, 1.0, 5.0, 1_000_000, 1);
        assert!((ei - mc).abs() < 3.0 * se, "{ei} vs {mc} ± {se}");
    }

    #[test]
    fn far_below_incumbent() {
        let ei = expected_improvement(-10.0, 1.0, 0.0);
        assert!((ei - 10.0).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_sigma() {
        for mu in [-2.0, -0.5, 0.0, 0.5, 3.0] {
            let mut prev = 0.0;
            for k in 0..200 {
                let sigma = k as f64 * 0.05;
                let ei = expected_improvement(mu, sigma, 0.0);
                assert!(ei >= prev - 1e-15, "mu {mu} sigma {sigma}");
                assert!(ei >= 0.0);
                prev = ei;
            }
        }
    }

    fn two_leaf_forest(values: &[f64]) -> ForestModel {
        ForestModel::from_trees(values.iter().map(|v| RegressionTree::constant(*v)).collect(), 1)
    }

    #[test]
    fn forced_choice() {
        let forest = two_leaf_forest(&[1.0, 2.0]);
        let candidates = vec![vec![0.0], vec![1.0], vec![2.0]];
        let sampled = [true, false, true];
        let ctx = AcquisitionContext {
            m_best: 0.0,
            candidates: &candidates,
            sampled: &sampled,
        };
        assert_eq!(select_next(&forest, &ctx).unwrap(), 1);
    }

    #[test]
    fn all_zero_ei_picks_lowest_unsampled() {
        let forest = two_leaf_forest(&[4.0]);
        let candidates = vec![vec![0.0], vec![1.0], vec![2.0]];
        let sampled = [true, false, false];
        let ctx = AcquisitionContext {
            m_best: 1.0,
            candidates: &candidates,
            sampled: &sampled,
        };
        assert_eq!(select_next(&forest, &ctx).unwrap(), 1);
    }

    #[test]
    fn argmax_of_scores() {
        assert_eq!(argmax_first(&[None, Some(0.2), Some(0.7)]), Some(2));
        assert_eq!(argmax_first(&[Some(0.7), Some(0.2), Some(0.7)]), Some(0));
        assert_eq!(argmax_first(&[None, None]), None);
    }

    #[test]
    fn argmax_over_a_real_split() {
        // Tree 1 sends x <= 0.5 to 1.0 and x > 0.5 to 3.0; tree 2 is flat at 2.0.
        let x = [vec![0.0], vec![1.0]];
        let xr: Vec<&[f64]> = x.iter().map(|r| r.as_slice()).collect();
        let split = RegressionTree::fit_least_squares(&xr, &[1.0, 3.0], Default::default());
        let forest = ForestModel::from_trees(vec![split, RegressionTree::constant(2.0)], 1);
        let candidates = vec![vec![1.0], vec![0.0]];
        let sampled = [false, false];
        let ctx = AcquisitionContext {
            m_best: 2.0,
            candidates: &candidates,
            sampled: &sampled,
        };
        assert_eq!(select_next(&forest, &ctx).unwrap(), 1);
    }

    #[test]
    fn exhausted_pool() {
        let forest = two_leaf_forest(&[1.0]);
        let candidates = vec![vec![0.0]];
        let ctx = AcquisitionContext {
            m_best: 0.0,
            candidates: &candidates,
            sampled: &[true],
        };
        assert!(matches!(
            select_next(&forest, &ctx),
            Err(Error::CandidatesExhausted)
        ));
    }
}
