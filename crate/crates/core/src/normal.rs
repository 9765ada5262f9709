//! Standard normal density and distribution functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

pub fn ln_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

/// Φ(z), computed from `erfc` so both tails keep full relative precision.
pub fn cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// 1 − Φ(z).
pub fn sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

// Past this point erfc underflows, so the upper tail uses the asymptotic
// Mills-ratio series instead.
const TAIL: f64 = 30.0;

/// (1 − Φ(z)) / φ(z) for z ≥ TAIL.
fn mills_tail(z: f64) -> f64 {
    let w = 1.0 / (z * z);
    (1.0 - w * (1.0 - 3.0 * w * (1.0 - 5.0 * w * (1.0 - 7.0 * w)))) / z
}

/// log(1 − Φ(z)).
pub fn ln_sf(z: f64) -> f64 {
    if z < TAIL {
        sf(z).ln()
    } else {
        ln_pdf(z) + mills_tail(z).ln()
    }
}

/// Hazard φ(z) / (1 − Φ(z)).
pub fn hazard(z: f64) -> f64 {
    if z < TAIL {
        pdf(z) / sf(z)
    } else {
        1.0 / mills_tail(z)
    }
}
