//! Replicated simulation of the reflected process: ruin probabilities,
//! conditional ruin times and maximum losses, and comparisons with the
//! asymptotic formulas.
//!
//! Replications are generated in pairs from one circulant-embedding FFT;
//! pair `p` draws from stream `p` of the master seed and yields
//! replications `2p` and `2p + 1`. Per-replication outcomes are collected in
//! index order and reduced sequentially, so every estimate is bit-identical
//! for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    loss_limit_scaling, psi_gamma, ruin_time_limit_law, Constants, Extended, HorizonScenario, LimitKind, LimitLaw,
};
use crate::error::{Error, Result};
use crate::fbm::{FgnGenerator, GridSpec};
use crate::normal;
use crate::reflection::{scan_ruin, ModelParams, RuinOutcome};
use crate::rng;
use crate::stats::{self, Interval, Z_95};

pub const MIN_REPLICATIONS: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub params: ModelParams,
    pub u: f64,
    pub scenario: HorizonScenario,
    pub grid: GridSpec,
    pub replications: u64,
    pub master_seed: u64,
}

impl ExperimentSpec {
    /// Spec whose grid spans exactly the simulation horizon `T_u` (the
    /// infinite-horizon proxy when `T_u = ∞`).
    pub fn new(
        params: ModelParams,
        u: f64,
        scenario: HorizonScenario,
        n_steps: usize,
        replications: u64,
        master_seed: u64,
    ) -> Result<Self> {
        let horizon = scenario.simulation_horizon(&params, u)?;
        let spec = ExperimentSpec {
            params,
            u,
            scenario,
            grid: GridSpec::new(n_steps, horizon)?,
            replications,
            master_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.u >= 0.0 && self.u.is_finite()) {
            return Err(Error::param("u", format!("must be nonnegative, got {}", self.u)));
        }
        self.grid.validate()?;
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::param(
                "replications",
                format!("need at least {MIN_REPLICATIONS}, got {}", self.replications),
            ));
        }
        let t_u = self.horizon()?;
        if self.grid.horizon < t_u * (1.0 - 1e-12) {
            return Err(Error::InvalidGrid(format!(
                "grid horizon {} is shorter than T_u = {t_u}",
                self.grid.horizon
            )));
        }
        Ok(())
    }

    /// `T_u`, or the infinite-horizon proxy.
    pub fn horizon(&self) -> Result<f64> {
        self.scenario.simulation_horizon(&self.params, self.u)
    }

    /// Last grid index inside `[0, T_u]`.
    pub fn horizon_index(&self) -> Result<usize> {
        Ok(self.grid.index_at_or_before(self.horizon()?).min(self.grid.n_steps))
    }

    pub fn with_u(&self, u: f64) -> Result<Self> {
        ExperimentSpec::new(self.params, u, self.scenario, self.grid.n_steps, self.replications, self.master_seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CiMethod {
    Wilson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: u64,
    pub n_hits: u64,
    pub method: CiMethod,
}

impl McEstimate {
    pub fn from_counts(n_hits: u64, n: u64) -> Self {
        let ci = stats::wilson_interval(n_hits, n, Z_95);
        McEstimate {
            point: n_hits as f64 / n as f64,
            ci_low: ci.lo,
            ci_high: ci.hi,
            n,
            n_hits,
            method: CiMethod::Wilson,
        }
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.ci_low,
            hi: self.ci_high,
        }
    }
}

fn infeasible(n: u64) -> Error {
    Error::InfeasibleRareEvent {
        replications: n,
        upper_bound: 3.0 / n as f64,
    }
}

/// First passage `(index, overshoot)` of each replication for each `γ`,
/// driven by the same fBm path: `outcomes[rep][g]`.
fn simulate(spec: &ExperimentSpec, gammas: &[f64]) -> Result<Vec<Vec<Option<(usize, f64)>>>> {
    spec.validate()?;
    for &g in gammas {
        spec.params.with_gamma(g)?;
    }
    let n = spec.grid.n_steps;
    let step = spec.grid.step();
    let last = spec.horizon_index()?;
    let generator = FgnGenerator::shared(spec.params.hurst, n)?;
    let scale = step.powf(spec.params.h());
    let drift_step = spec.params.drift * step;
    let pairs = spec.replications.div_ceil(2);

    let per_pair: Vec<[Vec<Option<(usize, f64)>>; 2]> = (0..pairs)
        .into_par_iter()
        .map_init(
            || (Vec::new(), vec![0.0; n], vec![0.0; n], vec![0.0; last + 1]),
            |(work, a, b, y), pair| {
                let mut rng = rng::stream(spec.master_seed, pair);
                generator.sample_pair_into(&mut rng, work, a, b);
                let mut run = |fgn: &[f64]| {
                    y[0] = 0.0;
                    let mut x = 0.0;
                    for k in 1..=last {
                        x += scale * fgn[k - 1];
                        y[k] = x - drift_step * k as f64;
                    }
                    gammas.iter().map(|&g| scan_ruin(y, g, spec.u, last)).collect::<Vec<_>>()
                };
                [run(a), run(b)]
            },
        )
        .collect();
    Ok(per_pair
        .into_iter()
        .flatten()
        .take(spec.replications as usize)
        .collect())
}

/// Per-replication ruin outcomes at the spec's `γ`.
pub fn simulate_outcomes(spec: &ExperimentSpec) -> Result<Vec<RuinOutcome>> {
    let grid = spec.grid;
    Ok(simulate(spec, &[spec.params.gamma])?
        .into_iter()
        .map(|o| match o[0] {
            Some((k, loss)) => RuinOutcome {
                ruined: true,
                ruin_index: Some(k),
                ruin_time: Some(grid.time(k)),
                max_loss: Some(loss),
            },
            None => RuinOutcome::SURVIVED,
        })
        .collect())
}

/// Fraction of ruined replications with a Wilson 95% interval.
pub fn estimate_ruin_prob(spec: &ExperimentSpec) -> Result<McEstimate> {
    let hits = simulate(spec, &[spec.params.gamma])?
        .iter()
        .filter(|o| o[0].is_some())
        .count() as u64;
    if hits == 0 {
        return Err(infeasible(spec.replications));
    }
    Ok(McEstimate::from_counts(hits, spec.replications))
}

/// Ruin probabilities at the spec's grid and at twice its resolution, same
/// seed, to expose the downward bias of grid maxima.
pub fn estimate_ruin_prob_two_resolutions(spec: &ExperimentSpec) -> Result<[McEstimate; 2]> {
    let fine = ExperimentSpec {
        grid: GridSpec::new(2 * spec.grid.n_steps, spec.grid.horizon)?,
        ..*spec
    };
    Ok([estimate_ruin_prob(spec)?, estimate_ruin_prob(&fine)?])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSweep {
    pub gammas: Vec<f64>,
    pub estimates: Vec<McEstimate>,
}

/// Ruin probabilities for several `γ` from shared paths. Because
/// `W_γ` is pathwise nondecreasing in `γ`, so are the hit counts.
pub fn estimate_ruin_prob_gammas(spec: &ExperimentSpec, gammas: &[f64]) -> Result<GammaSweep> {
    let outcomes = simulate(spec, gammas)?;
    let estimates = (0..gammas.len())
        .map(|g| {
            let hits = outcomes.iter().filter(|o| o[g].is_some()).count() as u64;
            McEstimate::from_counts(hits, spec.replications)
        })
        .collect();
    Ok(GammaSweep {
        gammas: gammas.to_vec(),
        estimates,
    })
}

/// Ratio `hits_num / hits_den` of two nested events estimated on shared
/// paths (every denominator hit is a numerator hit, or vice versa for
/// ratios below 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub numerator_hits: u64,
    pub denominator_hits: u64,
    pub n: u64,
    pub ratio: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RatioEstimate {
    /// For nested events the smaller count is binomial given the larger one;
    /// its Wilson interval maps to an interval for the ratio.
    fn nested(numerator_hits: u64, denominator_hits: u64, n: u64) -> Result<Self> {
        if numerator_hits == 0 || denominator_hits == 0 {
            return Err(infeasible(n));
        }
        let (ratio, lo, hi) = if numerator_hits >= denominator_hits {
            let ci = stats::wilson_interval(denominator_hits, numerator_hits, Z_95);
            (numerator_hits as f64 / denominator_hits as f64, 1.0 / ci.hi, 1.0 / ci.lo)
        } else {
            let ci = stats::wilson_interval(numerator_hits, denominator_hits, Z_95);
            (numerator_hits as f64 / denominator_hits as f64, ci.lo, ci.hi)
        };
        Ok(RatioEstimate {
            numerator_hits,
            denominator_hits,
            n,
            ratio,
            ci_low: lo,
            ci_high: hi,
        })
    }
}

/// `ψ_γ / ψ_0` from shared paths.
pub fn estimate_gamma_ratio(spec: &ExperimentSpec) -> Result<RatioEstimate> {
    let sweep = estimate_ruin_prob_gammas(spec, &[0.0, spec.params.gamma])?;
    RatioEstimate::nested(sweep.estimates[1].n_hits, sweep.estimates[0].n_hits, spec.replications)
}

/// `P(τ <= T_u) / P(τ < ∞)` for the long-horizon scenario with finite `x`,
/// from shared paths on the infinite-horizon proxy; tends to `Φ(x)`.
pub fn estimate_long_horizon_ratio(spec: &ExperimentSpec) -> Result<RatioEstimate> {
    let HorizonScenario::Long { x: Extended::Finite(_) } = spec.scenario else {
        return Err(Error::RegimeMismatch("horizon ratio needs a long-horizon scenario with finite x".into()));
    };
    let t_u = spec.horizon()?;
    let proxy_scenario = HorizonScenario::Long { x: Extended::PlusInfinity };
    let proxy = ExperimentSpec::new(
        spec.params,
        spec.u,
        proxy_scenario,
        spec.grid.n_steps,
        spec.replications,
        spec.master_seed,
    )?;
    let cut = proxy.grid.index_at_or_before(t_u);
    let outcomes = simulate(&proxy, &[spec.params.gamma])?;
    let all = outcomes.iter().filter(|o| o[0].is_some()).count() as u64;
    let within = outcomes
        .iter()
        .filter(|o| matches!(o[0], Some((k, _)) if k <= cut))
        .count() as u64;
    RatioEstimate::nested(within, all, spec.replications)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleKind {
    ScaledRuinTime,
    ScaledMaxLoss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalSample {
    pub kind: SampleKind,
    /// One value per ruined replication, in replication order.
    pub values: Vec<f64>,
    pub scaling_used: f64,
    /// Limit law of the values. For losses the values are
    /// `scaling_used · L`, compared with its CDF directly.
    pub law_expected: LimitLaw,
    pub n_replications: u64,
}

/// Scaled conditional ruin times, with the regime's limit law.
pub fn sample_conditional_ruin_times(spec: &ExperimentSpec) -> Result<ConditionalSample> {
    let law = ruin_time_limit_law(&spec.params, spec.u, &spec.scenario)?;
    let grid = spec.grid;
    let values: Vec<f64> = simulate(spec, &[spec.params.gamma])?
        .iter()
        .filter_map(|o| o[0].map(|(k, _)| law.statistic(grid.time(k))))
        .collect();
    if values.is_empty() {
        return Err(infeasible(spec.replications));
    }
    Ok(ConditionalSample {
        kind: SampleKind::ScaledRuinTime,
        values,
        scaling_used: law.scaling,
        law_expected: law,
        n_replications: spec.replications,
    })
}

/// Scaled conditional maximum losses `L(γ, u) · scaling`, asymptotically
/// unit exponential.
pub fn sample_conditional_losses(spec: &ExperimentSpec) -> Result<ConditionalSample> {
    let scaling = loss_limit_scaling(&spec.params, spec.u, &spec.scenario)?;
    let values: Vec<f64> = simulate(spec, &[spec.params.gamma])?
        .iter()
        .filter_map(|o| o[0].map(|(_, loss)| scaling * loss))
        .collect();
    if values.is_empty() {
        return Err(infeasible(spec.replications));
    }
    Ok(ConditionalSample {
        kind: SampleKind::ScaledMaxLoss,
        values,
        scaling_used: scaling,
        law_expected: LimitLaw {
            kind: LimitKind::UnitExponential,
            scaling,
            anchor: 0.0,
            truncation_x: None,
        },
        n_replications: spec.replications,
    })
}

/// Kolmogorov–Smirnov distance between a conditional sample and its
/// expected limit law.
pub fn ks_statistic(sample: &ConditionalSample) -> Result<f64> {
    let law = sample.law_expected;
    stats::ks_statistic(&sample.values, |y| law.cdf(y))
}

/// What an MC estimate is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reference {
    /// The asymptotic formula `ψ_γ` (or `ψ_0`).
    Asymptotic,
    /// `exp(-2cu)`, the exact infinite-horizon ruin probability of drifted
    /// Brownian motion (`H = 1/2`, `γ = 0`).
    BrownianExact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub u: f64,
    pub horizon: f64,
    pub n_steps: usize,
    pub mc: McEstimate,
    pub reference: f64,
    pub ratio: f64,
    pub ratio_ci_low: f64,
    pub ratio_ci_high: f64,
    pub boundary_level: Option<f64>,
    pub regime_reached: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub params: ModelParams,
    pub scenario: HorizonScenario,
    pub reference: Reference,
    pub replications: u64,
    pub master_seed: u64,
    pub rows: Vec<ComparisonRow>,
    /// Tolerances are engineering choices; the asymptotics carry no error rates.
    pub note: String,
}

impl ComparisonReport {
    /// `|ratio - 1|` shrinks along the ladder.
    pub fn trends_to_one(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| (w[1].ratio - 1.0).abs() <= (w[0].ratio - 1.0).abs())
    }
}

/// MC ruin probability at one `u` against the chosen reference.
pub fn compare_mc_vs_asymptotic(spec: &ExperimentSpec, reference: Reference, constants: &Constants) -> Result<ComparisonRow> {
    let (value, level, reached) = match reference {
        Reference::Asymptotic => {
            let a = psi_gamma(&spec.params, spec.u, &spec.scenario, constants)?;
            (a.value, Some(a.boundary_level), Some(a.regime_reached))
        }
        Reference::BrownianExact => {
            let p = &spec.params;
            let brownian = p.hurst.value() == 0.5 && p.gamma == 0.0;
            if !brownian || spec.scenario != (HorizonScenario::Long { x: Extended::PlusInfinity }) {
                return Err(Error::RegimeMismatch(
                    "the exact reference needs H = 1/2, gamma = 0 and the infinite horizon".into(),
                ));
            }
            ((-2.0 * p.drift * spec.u).exp(), None, None)
        }
    };
    let mc = estimate_ruin_prob(spec)?;
    Ok(ComparisonRow {
        u: spec.u,
        horizon: spec.grid.horizon,
        n_steps: spec.grid.n_steps,
        ratio: mc.point / value,
        ratio_ci_low: mc.ci_low / value,
        ratio_ci_high: mc.ci_high / value,
        mc,
        reference: value,
        boundary_level: level,
        regime_reached: reached,
    })
}

/// [`compare_mc_vs_asymptotic`] along a ladder of `u`, re-deriving the grid
/// horizon at each level with the template's `n_steps`.
pub fn compare_ladder(
    template: &ExperimentSpec,
    us: &[f64],
    reference: Reference,
    constants: &Constants,
) -> Result<ComparisonReport> {
    let rows = us
        .iter()
        .map(|&u| compare_mc_vs_asymptotic(&template.with_u(u)?, reference, constants))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport {
        params: template.params,
        scenario: template.scenario,
        reference,
        replications: template.replications,
        master_seed: template.master_seed,
        rows,
        note: "MC-vs-asymptotic tolerances are engineering choices; grid maxima bias MC estimates downward".into(),
    })
}

/// `Φ(x)` reference for [`estimate_long_horizon_ratio`].
pub fn long_horizon_reference(x: f64) -> f64 {
    normal::cdf(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brownian_spec(u: f64, n: usize, reps: u64, seed: u64) -> ExperimentSpec {
        ExperimentSpec::new(
            ModelParams::new(0.5, 1.0, 0.0).unwrap(),
            u,
            HorizonScenario::Long { x: Extended::PlusInfinity },
            n,
            reps,
            seed,
        )
        .unwrap()
    }

    #[test]
    fn spec_validation() {
        let mut s = brownian_spec(1.0, 256, 100, 1);
        s.replications = 99;
        assert!(s.validate().is_err());
        let mut s = brownian_spec(1.0, 256, 100, 1);
        s.grid.horizon = 1.0;
        assert!(matches!(s.validate(), Err(Error::InvalidGrid(_))));
        let mut s = brownian_spec(1.0, 256, 100, 1);
        s.u = -1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn deterministic_and_ordered() {
        let s = brownian_spec(0.5, 512, 301, 7);
        let a = simulate_outcomes(&s).unwrap();
        let b = simulate_outcomes(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 301);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| simulate_outcomes(&s).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn zero_surplus_ruins_almost_surely() {
        let s = ExperimentSpec::new(
            ModelParams::new(0.5, 1.0, 0.0).unwrap(),
            0.0,
            HorizonScenario::Short { coefficient: 0.1, exponent: 0.0 },
            4096,
            200,
            3,
        )
        .unwrap();
        let e = estimate_ruin_prob(&s).unwrap();
        assert!(e.point > 0.95, "{e:?}");
        assert!(e.ci_low <= e.point && e.point <= e.ci_high);
    }

    #[test]
    fn no_hits_is_an_error() {
        let s = ExperimentSpec::new(
            ModelParams::new(0.5, 5.0, 0.0).unwrap(),
            20.0,
            HorizonScenario::Short { coefficient: 0.1, exponent: 0.0 },
            64,
            100,
            3,
        )
        .unwrap();
        assert_eq!(
            estimate_ruin_prob(&s),
            Err(Error::InfeasibleRareEvent { replications: 100, upper_bound: 0.03 })
        );
        assert!(matches!(sample_conditional_losses(&s), Err(Error::InfeasibleRareEvent { .. })));
        assert!(matches!(sample_conditional_ruin_times(&s), Err(Error::InfeasibleRareEvent { .. })));
    }

    #[test]
    fn gamma_sweep_is_monotone() {
        let base = brownian_spec(1.0, 1024, 400, 11);
        let sweep = estimate_ruin_prob_gammas(&base, &[0.0, 0.3, 0.6, 0.9, 1.0]).unwrap();
        for w in sweep.estimates.windows(2) {
            assert!(w[1].n_hits >= w[0].n_hits);
        }
        // the single-γ path agrees with the sweep
        let spec = ExperimentSpec {
            params: base.params.with_gamma(0.6).unwrap(),
            ..base
        };
        assert_eq!(estimate_ruin_prob(&spec).unwrap(), sweep.estimates[2]);
    }

    #[test]
    fn conditional_sample_sizes_match_hits() {
        let s = brownian_spec(0.5, 512, 300, 5);
        let p = estimate_ruin_prob(&s).unwrap();
        let losses = sample_conditional_losses(&s).unwrap();
        let times = sample_conditional_ruin_times(&s).unwrap();
        assert_eq!(losses.values.len() as u64, p.n_hits);
        assert_eq!(times.values.len() as u64, p.n_hits);
        assert!(losses.values.iter().all(|&v| v >= 0.0));
        assert_eq!(
            losses.scaling_used,
            loss_limit_scaling(&s.params, s.u, &s.scenario).unwrap()
        );
    }

    #[test]
    fn short_regime_times_are_nonnegative() {
        let s = ExperimentSpec::new(
            ModelParams::new(0.5, 1.0, 0.3).unwrap(),
            1.0,
            HorizonScenario::Short { coefficient: 1.0, exponent: 0.0 },
            512,
            400,
            9,
        )
        .unwrap();
        let sample = sample_conditional_ruin_times(&s).unwrap();
        assert!(sample.values.iter().all(|&v| v >= 0.0));
        assert_eq!(sample.law_expected.kind, LimitKind::UnitExponential);
    }

    #[test]
    fn ratio_intervals() {
        let r = RatioEstimate::nested(160, 100, 1000).unwrap();
        assert!((r.ratio - 1.6).abs() < 1e-15);
        assert!(r.ci_low < 1.6 && r.ci_high > 1.6);
        let r = RatioEstimate::nested(80, 100, 1000).unwrap();
        assert!(r.ci_low < 0.8 && r.ci_high > 0.8 && r.ci_high <= 1.0);
        assert!(RatioEstimate::nested(0, 10, 100).is_err());
    }

    #[test]
    fn comparison_round_trips_through_json() {
        let template = brownian_spec(0.5, 256, 200, 2);
        let report = compare_ladder(&template, &[0.5, 1.0], Reference::BrownianExact, &Constants::default()).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: ComparisonReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(report.rows.len(), 2);
        assert!(compare_mc_vs_asymptotic(
            &ExperimentSpec { params: template.params.with_gamma(0.5).unwrap(), ..template },
            Reference::BrownianExact,
            &Constants::default()
        )
        .is_err());
    }

    #[test]
    fn long_ratio_needs_finite_x() {
        let s = brownian_spec(1.0, 256, 100, 1);
        assert!(matches!(estimate_long_horizon_ratio(&s), Err(Error::RegimeMismatch(_))));
    }
}
