//! Gaussian upper-tail probability `Q(x)` and its inverse.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

use crate::error::{domain, Result};

/// Search bracket for the inverse; `Q(±39)` saturates in double precision.
const BRACKET: f64 = 39.0;

/// `Q(x) = P(Z > x)` for standard normal `Z`.
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Q⁻¹(p)` for `0 < p < 1`: bisection to a tight bracket, then Newton.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("Q inverse needs 0 < p < 1, got {p}")));
    }
    // Q is strictly decreasing: Q(lo) > p > Q(hi).
    let (mut lo, mut hi) = (-BRACKET, BRACKET);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let q = q_func(mid);
        if q == p {
            return Ok(mid);
        }
        if q > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let pdf = normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        let step = (q_func(x) - p) / pdf;
        let next = (x + step).clamp(lo, hi);
        let delta = (next - x).abs();
        x = next;
        if delta < 1e-12 {
            break;
        }
    }
    Ok(x)
}
