use fbm_ruin::constants::{
    alpha2_oracle, estimate, pickands_estimate, piterbarg_estimate, tilde_piterbarg_estimate, ConstantJob,
};
use fbm_ruin::{ConstantKind, EstimatorMethod};

fn within_sigmas(value: f64, std_error: f64, target: f64, k: f64) -> bool {
    (value - target).abs() <= k * std_error
}

#[test]
fn alpha2_estimates_agree_with_grid_oracle() {
    let (s, step, reps) = (10.0, 0.01, 4_000);
    let cases = [
        (ConstantKind::Pickands, None),
        (ConstantKind::Piterbarg, Some(0.5)),
        (ConstantKind::Piterbarg, Some(2.0)),
        (ConstantKind::TildePiterbarg, Some(1.0)),
    ];
    for (kind, b) in cases {
        let e = estimate(&ConstantJob {
            kind,
            alpha: 2.0,
            b,
            horizon: s,
            grid_step: step,
            replications: reps,
            seed: 21,
            method: EstimatorMethod::Tilted,
        })
        .unwrap();
        let oracle = alpha2_oracle(kind, b, s, step).unwrap();
        assert!(
            within_sigmas(e.value, e.std_error, oracle, 3.0),
            "{kind:?} b = {b:?}: {} ± {} vs oracle {oracle}",
            e.value,
            e.std_error
        );
    }
}

#[test]
fn piterbarg_oracle_increases_with_horizon() {
    for b in [0.5, 1.0, 2.0] {
        let values: Vec<f64> = [1.0, 2.0, 5.0, 10.0, 20.0]
            .iter()
            .map(|&s| alpha2_oracle(ConstantKind::Piterbarg, Some(b), s, 0.01).unwrap())
            .collect();
        // flat to quadrature accuracy once the drift dominates
        assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-9), "b = {b}: {values:?}");
    }
}

#[test]
fn pickands_truncation_bias_shrinks_with_horizon() {
    let limit = 1.0 / std::f64::consts::PI.sqrt();
    let bias: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
        .iter()
        .map(|&s| alpha2_oracle(ConstantKind::Pickands, None, s, 0.01).unwrap() - limit)
        .collect();
    assert!(bias.windows(2).all(|w| w[1] < w[0]), "{bias:?}");
    assert!(bias.iter().all(|&x| x > 0.0));
}

#[test]
fn two_sided_constant_dominates_one_sided() {
    for alpha in [1.0, 1.5, 2.0] {
        let one = piterbarg_estimate(alpha, 1.0, 10.0, 0.02, 2_000, 4).unwrap();
        let two = tilde_piterbarg_estimate(alpha, 1.0, 10.0, 0.02, 2_000, 4).unwrap();
        assert!(
            two.value > one.value + 2.0 * (one.std_error + two.std_error),
            "alpha = {alpha}: {} vs {}",
            two.value,
            one.value
        );
    }
}

#[test]
fn direct_and_tilted_estimators_agree() {
    let job = |method| ConstantJob {
        kind: ConstantKind::Piterbarg,
        alpha: 1.0,
        b: Some(1.0),
        horizon: 10.0,
        grid_step: 0.02,
        replications: 4_000,
        seed: 8,
        method,
    };
    let d = estimate(&job(EstimatorMethod::Direct)).unwrap();
    let t = estimate(&job(EstimatorMethod::Tilted)).unwrap();
    let se = (d.std_error.powi(2) + t.std_error.powi(2)).sqrt();
    assert!((d.value - t.value).abs() < 4.0 * se, "{} vs {} (se {se})", d.value, t.value);
}

#[test]
fn brownian_pickands_is_near_one_below_grid_bias() {
    // the grid maximum misses the continuous supremum, biasing H_1 low
    let e = pickands_estimate(1.0, 20.0, 0.01, 4_000, 6).unwrap();
    assert!(e.value > 0.85 && e.value < 1.02, "{} ± {}", e.value, e.std_error);
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let run = || piterbarg_estimate(1.5, 0.7, 5.0, 0.05, 301, 99).unwrap();
    let a = run();
    let b = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(run);
    assert_eq!(a, b);
}
