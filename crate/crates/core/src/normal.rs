//! Standard normal tail `Ψ`, distribution function `Φ` and density.

use std::f64::consts::{PI, SQRT_2};

use libm::erfc;

/// Above this level `Ψ` switches from `erfc` to the Mills-ratio series.
pub const MILLS_SWITCH: f64 = 8.0;

pub fn density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Upper tail `Ψ(x) = P(N > x)`.
pub fn tail(x: f64) -> f64 {
    if x <= MILLS_SWITCH {
        0.5 * erfc(x / SQRT_2)
    } else {
        density(x) / x * mills_series(x)
    }
}

/// `ln Ψ(x)`, finite far beyond the point where `Ψ` underflows.
pub fn ln_tail(x: f64) -> f64 {
    if x <= MILLS_SWITCH {
        tail(x).ln()
    } else {
        -0.5 * x * x - 0.5 * (2.0 * PI).ln() - x.ln() + mills_series(x).ln()
    }
}

/// `Φ(x) = P(N <= x)`.
pub fn cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else {
        tail(-x)
    }
}

/// `x Ψ(x) / φ(x)` via the asymptotic series `Σ (-1)^k (2k-1)!! / x^{2k}`,
/// truncated at its smallest term.
fn mills_series(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..200 {
        let next = -term * (2 * k - 1) as f64 * inv2;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}
