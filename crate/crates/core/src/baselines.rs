//! Search strategies compared against predictive termination, and the
//! per-interval decisions that distinguish them.
//!
//! Every strategy runs through the same loop in [`crate::optimizer`]; they
//! differ only in how the next candidate is chosen and when a running
//! sample is dropped:
//!
//! | strategy | selection        | early termination                              |
//! |----------|------------------|------------------------------------------------|
//! | `rs`     | uniform random   | never                                          |
//! | `bo`     | forest + EI      | never                                          |
//! | `bo-st`  | forest + EI      | measured value reaches the first sample's value |
//! | `bo-tc`  | forest + EI      | measured value reaches the best so far          |
//! | `bo-gb`  | forest + EI      | least-squares GBT prediction reaches the best   |
//! | `cello`  | forest + EI      | censored-regression prediction reaches the best |

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boost::{fit_squared_gbt, BoostParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "rs")]
    Rs,
    #[serde(rename = "bo")]
    Bo,
    #[serde(rename = "bo-st")]
    BoSt,
    #[serde(rename = "bo-tc")]
    BoTc,
    #[serde(rename = "bo-gb")]
    BoGb,
    #[serde(rename = "cello")]
    Cello,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Rs,
        Strategy::Bo,
        Strategy::BoSt,
        Strategy::BoTc,
        Strategy::BoGb,
        Strategy::Cello,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Rs => "rs",
            Strategy::Bo => "bo",
            Strategy::BoSt => "bo-st",
            Strategy::BoTc => "bo-tc",
            Strategy::BoGb => "bo-gb",
            Strategy::Cello => "cello",
        }
    }

    pub fn uses_surrogate(self) -> bool {
        self != Strategy::Rs
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown method `{s}`")))
    }
}

/// Uniform choice among unsampled candidates, `None` once all are sampled.
pub fn rs_step<R: Rng + ?Sized>(sampled: &[bool], rng: &mut R) -> Option<usize> {
    let open: Vec<usize> = (0..sampled.len()).filter(|&i| !sampled[i]).collect();
    if open.is_empty() {
        None
    } else {
        Some(open[rng.gen_range(0..open.len())])
    }
}

/// Measured termination against the initial sample's value.
pub fn bo_st_check(elapsed: f64, static_threshold: f64) -> bool {
    elapsed >= static_threshold
}

/// Measured termination against the best feasible value so far.
pub fn bo_tc_check(elapsed: f64, gamma: f64) -> bool {
    elapsed >= gamma
}

/// Least-squares boosted trees on finished samples only, ignoring whatever
/// the running sample has shown so far. Returns a predictor.
pub fn bo_gb_model(
    x_finished: &[Vec<f64>],
    y_finished: &[f64],
    params: &BoostParams,
) -> Result<impl Fn(&[f64]) -> f64> {
    if x_finished.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let rows: Vec<&[f64]> = x_finished.iter().map(|r| r.as_slice()).collect();
    let model = fit_squared_gbt(&rows, y_finished, params);
    Ok(move |x: &[f64]| model.predict(x))
}

pub fn bo_gb_predict(
    x_finished: &[Vec<f64>],
    y_finished: &[f64],
    x: &[f64],
    params: &BoostParams,
) -> Result<f64> {
    Ok(bo_gb_model(x_finished, y_finished, params)?(x))
}
