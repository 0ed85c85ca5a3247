//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use fbm_ruin::fbm::{fgn_covariance, CholeskySampler, FgnGenerator};
use fbm_ruin::rng::stream;
use fbm_ruin::stats::ks_two_sample;
use fbm_ruin::{GridSpec, HurstIndex};

pub fn hurst(h: f64) -> HurstIndex {
    HurstIndex::new(h).unwrap()
}

/// Largest `|Ĉ(i, j) - γ(|i - j|)|` over an `n × n` block of unit-step fGn,
/// from `reps` circulant-embedding samples.
pub fn fgn_covariance_error(h: f64, n: usize, reps: usize, seed: u64) -> f64 {
    let generator = FgnGenerator::new(hurst(h), n).unwrap();
    let mut sums = vec![0.0; n * n];
    let mut taken = 0;
    let mut pair = 0;
    while taken < reps {
        let (a, b) = generator.sample_pair(&mut stream(seed, pair), 1.0);
        pair += 1;
        for x in [a, b].iter().take(reps - taken) {
            for i in 0..n {
                for j in 0..=i {
                    sums[i * n + j] += x[i] * x[j];
                }
            }
            taken += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let empirical = sums[i * n + j] / reps as f64;
            worst = worst.max((empirical - fgn_covariance(hurst(h), i - j, 1.0)).abs());
        }
    }
    worst
}

/// Path maxima of `reps` fBm paths on `[0, 1]` with `n` steps, sampled by
/// the circulant embedding (`spectral`) and by the dense factorization.
pub fn path_suprema(h: f64, n: usize, reps: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let grid = GridSpec::new(n, 1.0).unwrap();
    let generator = FgnGenerator::new(hurst(h), n).unwrap();
    let running_max = |increments: &[f64]| {
        let mut acc = 0.0f64;
        let mut max = 0.0f64;
        for dx in increments {
            acc += dx;
            max = max.max(acc);
        }
        max
    };
    let mut spectral = Vec::with_capacity(reps);
    let mut pair = 0;
    while spectral.len() < reps {
        let (a, b) = generator.sample_pair(&mut stream(seed, pair), grid.step());
        pair += 1;
        spectral.push(running_max(&a));
        if spectral.len() < reps {
            spectral.push(running_max(&b));
        }
    }
    let dense = CholeskySampler::new(hurst(h), grid).unwrap();
    let mut rng = stream(seed ^ 0x5eed, 0);
    let cholesky = (0..reps)
        .map(|_| dense.sample(&mut rng).values.iter().copied().fold(0.0, f64::max))
        .collect();
    (spectral, cholesky)
}

pub fn suprema_ks(h: f64, n: usize, reps: usize, seed: u64) -> f64 {
    let (a, b) = path_suprema(h, n, reps, seed);
    ks_two_sample(&a, &b).unwrap()
}
