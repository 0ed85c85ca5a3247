//! Small statistics helpers: binomial confidence intervals and one-sample
//! Kolmogorov–Smirnov distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Minimum sample size for a Kolmogorov–Smirnov comparison.
pub const KS_MIN_OBSERVATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lo: if hits == 0 { 0.0 } else { (centre - half).max(0.0) },
        hi: if hits == trials { 1.0 } else { (centre + half).min(1.0) },
    }
}

/// `sup_y |F_n(y) - F(y)|` for the empirical distribution of `sample`
/// against a continuous reference CDF.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.len() < KS_MIN_OBSERVATIONS {
        return Err(Error::TooFewObservations {
            have: sample.len(),
            need: KS_MIN_OBSERVATIONS,
        });
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d.max(above).max(below)
    });
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    for s in [a, b] {
        if s.len() < KS_MIN_OBSERVATIONS {
            return Err(Error::TooFewObservations {
                have: s.len(),
                need: KS_MIN_OBSERVATIONS,
            });
        }
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Dvoretzky–Kiefer–Wolfowitz bound: with probability `1 - delta`,
/// `sup |F_n - F| <= sqrt(ln(2/delta) / (2n))`.
pub fn dkw_bound(n: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_value() {
        // 10 hits out of 100
        let ci = wilson_interval(10, 100, Z_95);
        assert!((ci.lo - 0.055_229).abs() < 1e-5, "{ci:?}");
        assert!((ci.hi - 0.174_366).abs() < 1e-5, "{ci:?}");
        let zero = wilson_interval(0, 50, Z_95);
        assert_eq!(zero.lo, 0.0);
        assert!(zero.hi > 0.0 && zero.hi < 0.1);
    }

    #[test]
    fn ks_of_uniform_grid_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn ks_needs_enough_points() {
        assert!(matches!(
            ks_statistic(&[0.1; 10], |x| x),
            Err(Error::TooFewObservations { have: 10, need: 50 })
        ));
    }

    #[test]
    fn two_sample_ks() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let shifted: Vec<f64> = a.iter().map(|x| x + 50.0).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        assert!((ks_two_sample(&a, &shifted).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dkw_value() {
        assert!((dkw_bound(1000, 0.05) - (40.0f64.ln() / 2000.0).sqrt()).abs() < 1e-15);
    }
}
