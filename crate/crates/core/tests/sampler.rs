mod common;

use fbm_ruin::fbm::{fgn_covariance, sample_fbm_spectral, CholeskySampler, FgnGenerator};
use fbm_ruin::rng::stream;
use fbm_ruin::GridSpec;

use common::{fgn_covariance_error, hurst, suprema_ks};

#[test]
fn circulant_covariance_matches_fgn_across_hurst() {
    for h in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let err = fgn_covariance_error(h, 24, 20_000, 11);
        assert!(err < 0.05, "H = {h}: max covariance error {err}");
    }
}

#[test]
fn spectral_and_cholesky_suprema_agree() {
    for h in [0.3, 0.7] {
        let ks = suprema_ks(h, 128, 8_000, 3);
        assert!(ks < 0.03, "H = {h}: KS {ks}");
    }
}

#[test]
fn terminal_variance_scales_as_t_to_the_2h() {
    // Var X(T) = T^{2H} regardless of the grid.
    let h = 0.7;
    let reps = 20_000;
    for (n, horizon) in [(64, 1.0), (64, 8.0), (256, 8.0)] {
        let grid = GridSpec::new(n, horizon).unwrap();
        let generator = FgnGenerator::new(hurst(h), n).unwrap();
        let mut sum = 0.0;
        for pair in 0..reps / 2 {
            let (a, b) = generator.sample_pair(&mut stream(5, pair as u64), grid.step());
            sum += a.iter().sum::<f64>().powi(2) + b.iter().sum::<f64>().powi(2);
        }
        let var = sum / reps as f64;
        let want = horizon.powf(2.0 * h);
        assert!((var / want - 1.0).abs() < 0.04, "n = {n}, T = {horizon}: {var} vs {want}");
    }
}

#[test]
fn cholesky_path_covariance_is_exact() {
    let h = 0.3;
    let grid = GridSpec::new(16, 2.0).unwrap();
    let sampler = CholeskySampler::new(hurst(h), grid).unwrap();
    let mut rng = stream(17, 0);
    let reps = 40_000;
    let (i, j) = (5, 12);
    let (mut vi, mut cij) = (0.0, 0.0);
    for _ in 0..reps {
        let p = sampler.sample(&mut rng);
        vi += p.values[i] * p.values[i];
        cij += p.values[i] * p.values[j];
    }
    let (ti, tj) = (grid.time(i), grid.time(j));
    let r = |s: f64, t: f64| 0.5 * (s.powf(2.0 * h) + t.powf(2.0 * h) - (t - s).abs().powf(2.0 * h));
    assert!((vi / reps as f64 - r(ti, ti)).abs() < 0.03);
    assert!((cij / reps as f64 - r(ti, tj)).abs() < 0.03);
}

#[test]
fn path_sampler_is_seeded_and_starts_at_zero() {
    let grid = GridSpec::new(100, 3.0).unwrap();
    let a = sample_fbm_spectral(hurst(0.4), grid, 9).unwrap();
    let b = sample_fbm_spectral(hurst(0.4), grid, 9).unwrap();
    let c = sample_fbm_spectral(hurst(0.4), grid, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.values, c.values);
    assert_eq!(a.values[0], 0.0);
    assert_eq!(a.values.len(), 101);
}

#[test]
fn brownian_increments_are_uncorrelated() {
    assert_eq!(fgn_covariance(hurst(0.5), 3, 1.0), 0.0);
    let err = fgn_covariance_error(0.5, 16, 20_000, 2);
    assert!(err < 0.05, "{err}");
}
