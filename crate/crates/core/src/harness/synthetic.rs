//! Seeded synthetic workload traces.
//!
//! Every parameter is first mapped to a unit coordinate `u` in [0, 1]. The
//! log latency score of a configuration is a sum of
//!
//! * a quadratic bowl per parameter, `a_j (u_j - c_j)^2`, with weights
//!   drawn heavy-tailed so that a handful of parameters dominate,
//! * a ripple per parameter, `r_j sin(2π f_j u_j)`, which creates local
//!   optima,
//! * pairwise interactions `b_k (u_i - c_i)(u_j - c_j)` on random pairs,
//! * Gaussian noise.
//!
//! Scores are mapped affinely onto `[ln latency_lo, ln latency_hi]`.
//! Log power falls as the latency score falls, so fast configurations tend
//! to draw more power, plus its own per-parameter linear terms and noise;
//! it is mapped onto `[ln power_lo, ln power_hi]`. Energy is power times
//! latency.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::execution::{TraceRow, WorkloadTrace};
use crate::space::{ConfigSpace, Configuration, ParamKind, ParamSpec, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticParams {
    pub rows: usize,
    pub latency_lo: f64,
    pub latency_hi: f64,
    pub power_lo: f64,
    pub power_hi: f64,
    /// Noise std of the latency score, relative to the score's spread.
    pub noise: f64,
    /// Interaction pairs per parameter.
    pub interactions_per_param: f64,
    /// Strength of the latency/power trade-off.
    pub power_coupling: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            rows: 500,
            latency_lo: 20.0,
            latency_hi: 300.0,
            power_lo: 80.0,
            power_hi: 320.0,
            noise: 0.03,
            interactions_per_param: 1.0,
            power_coupling: 1.0,
        }
    }
}

/// Unit coordinate of one parameter value.
pub fn unit_coordinate(spec: &ParamSpec, value: &Value) -> Result<f64> {
    let x = spec.encode_value(value)?;
    let (lo, hi) = match &spec.kind {
        ParamKind::Continuous { lo, hi } => (*lo, *hi),
        ParamKind::Integer { lo, hi } => (*lo as f64, *hi as f64),
        ParamKind::Categorical { values } => (0.0, (values.len() - 1) as f64),
    };
    Ok(if hi > lo { (x - lo) / (hi - lo) } else { 0.5 })
}

struct Surface {
    center: Vec<f64>,
    weight: Vec<f64>,
    ripple: Vec<(f64, f64)>,
    pairs: Vec<(usize, usize, f64)>,
    power_weight: Vec<f64>,
}

impl Surface {
    fn draw(p: usize, params: &SyntheticParams, rng: &mut ChaCha8Rng) -> Self {
        let center = (0..p).map(|_| rng.gen_range(0.1..0.9)).collect();
        let weight: Vec<f64> = (0..p).map(|_| 3.0 * rng.gen::<f64>().powi(3)).collect();
        let ripple = weight
            .iter()
            .map(|w| (0.15 * w * rng.gen::<f64>(), rng.gen_range(1.5..3.5)))
            .collect();
        let n_pairs = if p < 2 {
            0
        } else {
            (params.interactions_per_param * p as f64).round() as usize
        };
        let pairs = (0..n_pairs)
            .map(|_| {
                let i = rng.gen_range(0..p);
                let j = (i + rng.gen_range(1..p)) % p;
                (i, j, rng.gen_range(-1.5..1.5))
            })
            .collect();
        let power_weight = (0..p).map(|_| rng.gen_range(-0.3..0.3)).collect();
        Surface {
            center,
            weight,
            ripple,
            pairs,
            power_weight,
        }
    }

    fn latency_score(&self, u: &[f64]) -> f64 {
        let mut s = 0.0;
        for (j, &x) in u.iter().enumerate() {
            let d = x - self.center[j];
            let (amp, freq) = self.ripple[j];
            s += self.weight[j] * d * d + amp * (std::f64::consts::TAU * freq * x).sin();
        }
        for &(i, j, b) in &self.pairs {
            s += b * (u[i] - self.center[i]) * (u[j] - self.center[j]);
        }
        s
    }

    fn power_score(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.power_weight).map(|(x, w)| x * w).sum()
    }
}

/// Affine map of `v` from `[lo, hi]` onto `[a, b]`.
fn rescale(v: &mut [f64], a: f64, b: f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    for x in v.iter_mut() {
        *x = if span > 0.0 {
            a + (b - a) * (*x - lo) / span
        } else {
            0.5 * (a + b)
        };
    }
}

pub fn generate_trace(space: &ConfigSpace, params: &SyntheticParams, seed: u64) -> Result<WorkloadTrace> {
    if params.rows == 0 {
        return Err(Error::InvalidParam(
            "synthetic trace needs at least one row".into(),
        ));
    }
    if !(0.0 < params.latency_lo && params.latency_lo < params.latency_hi)
        || !(0.0 < params.power_lo && params.power_lo < params.power_hi)
    {
        return Err(Error::InvalidParam(
            "synthetic ranges must be positive and increasing".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs: Vec<Configuration> = space.candidate_pool(params.rows, &mut rng)?;
    let surface = Surface::draw(space.dim(), params, &mut rng);

    let units: Vec<Vec<f64>> = configs
        .iter()
        .map(|c| {
            space
                .params()
                .iter()
                .zip(&c.values)
                .map(|(s, v)| unit_coordinate(s, v))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut latency: Vec<f64> = units.iter().map(|u| surface.latency_score(u)).collect();
    rescale(&mut latency, 0.0, 1.0);
    let noise = Normal::new(0.0, params.noise).expect("finite noise");
    for l in latency.iter_mut() {
        *l += noise.sample(&mut rng);
    }
    let mut power: Vec<f64> = units
        .iter()
        .zip(&latency)
        .map(|(u, l)| surface.power_score(u) - params.power_coupling * l + noise.sample(&mut rng))
        .collect();
    rescale(&mut latency, params.latency_lo.ln(), params.latency_hi.ln());
    rescale(&mut power, params.power_lo.ln(), params.power_hi.ln());

    let rows = configs
        .into_iter()
        .zip(latency.iter().zip(&power))
        .map(|(config, (l, p))| {
            let latency_s = l.exp();
            TraceRow {
                config,
                latency_s,
                energy_j: p.exp() * latency_s,
            }
        })
        .collect();
    WorkloadTrace::new(space.clone(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_in_range() {
        let space = ConfigSpace::builtin_spark();
        let p = SyntheticParams {
            rows: 200,
            ..Default::default()
        };
        let a = generate_trace(&space, &p, 3).unwrap();
        let b = generate_trace(&space, &p, 3).unwrap();
        let c = generate_trace(&space, &p, 4).unwrap();
        assert_eq!(a.rows(), b.rows());
        assert_ne!(a.rows(), c.rows());
        for r in a.rows() {
            assert!(r.latency_s >= 20.0 * (1.0 - 1e-12) && r.latency_s <= 300.0 * (1.0 + 1e-12));
            let w = r.avg_power();
            assert!((80.0 * (1.0 - 1e-9)..=320.0 * (1.0 + 1e-9)).contains(&w));
        }
    }

    #[test]
    fn latency_and_power_trade_off() {
        let space = ConfigSpace::builtin_spark();
        let t = generate_trace(&space, &SyntheticParams::default(), 1).unwrap();
        let l: Vec<f64> = t.rows().iter().map(|r| r.latency_s.ln()).collect();
        let p: Vec<f64> = t.rows().iter().map(|r| r.avg_power().ln()).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (ml, mp) = (mean(&l), mean(&p));
        let cov: f64 = l.iter().zip(&p).map(|(a, b)| (a - ml) * (b - mp)).sum();
        assert!(cov < 0.0);
    }

    #[test]
    fn unit_coordinates() {
        let s = ParamSpec::integer("k", 2, 6);
        assert_eq!(unit_coordinate(&s, &Value::Int(3)).unwrap(), 0.25);
        let c = ParamSpec::categorical("c", &["a", "b", "c"]);
        assert_eq!(unit_coordinate(&c, &Value::Cat("c".into())).unwrap(), 1.0);
    }
}
