//! Drifted input `Y(t) = X(t) - c t`, the γ-reflected process
//! `W(t) = Y(t) - γ inf_{s<=t} Y(s)`, and first-passage bookkeeping on grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::{FbmPath, GridSpec, HurstIndex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub hurst: HurstIndex,
    pub drift: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(hurst: f64, drift: f64, gamma: f64) -> Result<Self> {
        let p = ModelParams {
            hurst: HurstIndex::new(hurst)?,
            drift,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.drift > 0.0 && self.drift.is_finite()) {
            return Err(Error::param("drift", format!("must be positive, got {}", self.drift)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::param("gamma", format!("must lie in [0, 1], got {}", self.gamma)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.hurst.value()
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        let p = ModelParams { gamma, ..*self };
        p.validate()?;
        Ok(p)
    }
}

/// `values[k] - c t_k`.
pub fn drift_input(path: &FbmPath, c: f64) -> Vec<f64> {
    path.values
        .iter()
        .enumerate()
        .map(|(k, v)| v - c * path.grid.time(k))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectedPath {
    pub grid: GridSpec,
    pub params: ModelParams,
    pub w_values: Vec<f64>,
    pub running_inf: Vec<f64>,
}

impl ReflectedPath {
    /// Drift, then reflect, an fBm path.
    pub fn build(path: &FbmPath, params: ModelParams) -> Result<Self> {
        params.validate()?;
        let y = drift_input(path, params.drift);
        let (w_values, running_inf) = reflect(&y, params.gamma)?;
        Ok(ReflectedPath {
            grid: path.grid,
            params,
            w_values,
            running_inf,
        })
    }
}

/// One left-to-right pass returning `(w, running_inf)`.
pub fn reflect(y: &[f64], gamma: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    match y.first() {
        Some(&y0) if y0 == 0.0 => {}
        Some(&y0) => return Err(Error::NonZeroStart(y0)),
        None => return Err(Error::InvalidGrid("empty input path".into())),
    }
    let mut w = Vec::with_capacity(y.len());
    let mut inf = Vec::with_capacity(y.len());
    let mut m = 0.0f64;
    for &v in y {
        m = m.min(v);
        inf.push(m);
        w.push(v - gamma * m);
    }
    Ok((w, inf))
}

/// Reflection and first passage fused into one pass over
/// `y[..=horizon_index]`; agrees with [`reflect`] followed by
/// [`first_passage`] without materializing `w`. `y[0]` must be 0.
pub fn scan_ruin(y: &[f64], gamma: f64, u: f64, horizon_index: usize) -> Option<(usize, f64)> {
    let end = horizon_index.min(y.len().checked_sub(1)?);
    let mut m = 0.0f64;
    let mut first = None;
    let mut max = f64::NEG_INFINITY;
    for (k, &v) in y[..=end].iter().enumerate() {
        m = m.min(v);
        let w = v - gamma * m;
        if first.is_some() {
            max = max.max(w);
        } else if w > u {
            first = Some(k);
            max = w;
        }
    }
    first.map(|k| (k, max - u))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuinOutcome {
    pub ruined: bool,
    pub ruin_index: Option<usize>,
    pub ruin_time: Option<f64>,
    /// `max_{k <= horizon} w[k] - u`, only when ruined.
    pub max_loss: Option<f64>,
}

impl RuinOutcome {
    pub const SURVIVED: RuinOutcome = RuinOutcome {
        ruined: false,
        ruin_index: None,
        ruin_time: None,
        max_loss: None,
    };
}

/// First index `k <= horizon_index` with `w[k] > u` and the overshoot of the
/// maximum over `[0, horizon_index]`.
pub fn first_passage(w: &[f64], u: f64, horizon_index: usize) -> Option<(usize, f64)> {
    let window = &w[..=horizon_index.min(w.len() - 1)];
    let first = window.iter().position(|&v| v > u)?;
    let max = window[first..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((first, max - u))
}

pub fn ruin_outcome(path: &ReflectedPath, u: f64, horizon_index: usize) -> Result<RuinOutcome> {
    if horizon_index > path.grid.n_steps {
        return Err(Error::param(
            "horizon_index",
            format!("{} exceeds n_steps = {}", horizon_index, path.grid.n_steps),
        ));
    }
    Ok(match first_passage(&path.w_values, u, horizon_index) {
        Some((k, loss)) => RuinOutcome {
            ruined: true,
            ruin_index: Some(k),
            ruin_time: Some(path.grid.time(k)),
            max_loss: Some(loss),
        },
        None => RuinOutcome::SURVIVED,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn path_of(values: Vec<f64>, horizon: f64) -> FbmPath {
        FbmPath {
            grid: GridSpec::new(values.len() - 1, horizon).unwrap(),
            hurst: HurstIndex::new(0.5).unwrap(),
            values,
        }
    }

    #[test]
    fn drift_examples() {
        assert_eq!(drift_input(&path_of(vec![0.0; 3], 1.0), 1.0), vec![0.0, -0.5, -1.0]);
        assert_eq!(drift_input(&path_of(vec![0.0, 1.0, 2.0], 2.0), 1.0), vec![0.0; 3]);
        assert!(ModelParams::new(0.5, 0.0, 0.5).is_err());
        assert!(ModelParams::new(0.5, 1.0, 1.5).is_err());
    }

    #[test]
    fn reflect_examples() {
        let y = [0.0, -1.0, 0.5, -2.0];
        assert_eq!(reflect(&y, 1.0).unwrap().0, vec![0.0, 0.0, 1.5, 0.0]);
        assert_eq!(reflect(&y, 0.0).unwrap().0, y.to_vec());
        assert_eq!(reflect(&y, 0.5).unwrap().0, vec![0.0, -0.5, 1.0, -1.0]);
        assert_eq!(reflect(&[1.0, 0.0], 0.5), Err(Error::NonZeroStart(1.0)));
    }

    fn reflected(w: Vec<f64>) -> ReflectedPath {
        let n = w.len();
        ReflectedPath {
            grid: GridSpec::new(n - 1, (n - 1) as f64).unwrap(),
            params: ModelParams::new(0.5, 1.0, 0.0).unwrap(),
            running_inf: vec![0.0; n],
            w_values: w,
        }
    }

    #[test]
    fn ruin_examples() {
        let o = ruin_outcome(&reflected(vec![0.0, 2.0, 1.0]), 1.5, 2).unwrap();
        assert_eq!(o.ruin_index, Some(1));
        assert_eq!(o.ruin_time, Some(1.0));
        assert_eq!(o.max_loss, Some(0.5));

        let o = ruin_outcome(&reflected(vec![0.0, 1.0, 1.0]), 1.5, 2).unwrap();
        assert_eq!(o, RuinOutcome::SURVIVED);

        // strict inequality: w = u does not ruin
        let o = ruin_outcome(&reflected(vec![0.0, 0.0, 0.1, 0.05]), 0.0, 3).unwrap();
        assert_eq!(o.ruin_index, Some(2));
        assert!((o.max_loss.unwrap() - 0.1).abs() < 1e-15);

        // crossing after the horizon is ignored
        let o = ruin_outcome(&reflected(vec![0.0, 0.0, 3.0]), 1.0, 1).unwrap();
        assert!(!o.ruined);
        assert!(ruin_outcome(&reflected(vec![0.0, 0.0, 3.0]), 1.0, 3).is_err());
    }

    #[test]
    fn max_loss_uses_whole_window() {
        let o = ruin_outcome(&reflected(vec![0.0, 1.2, 0.0, 1.9, 5.0]), 1.0, 3).unwrap();
        assert_eq!(o.ruin_index, Some(1));
        assert!((o.max_loss.unwrap() - 0.9).abs() < 1e-15);
    }

    fn input_path() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3.0f64..3.0, 1..60).prop_map(|mut v| {
            v.insert(0, 0.0);
            v
        })
    }

    proptest! {
        #[test]
        fn reflection_invariants(y in input_path(), g1 in 0.0f64..=1.0, g2 in 0.0f64..=1.0) {
            let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
            let (w_lo, inf) = reflect(&y, lo).unwrap();
            let (w_hi, _) = reflect(&y, hi).unwrap();
            prop_assert_eq!(w_lo[0], 0.0);
            for k in 0..y.len() {
                prop_assert!(inf[k] <= 0.0);
                if k > 0 { prop_assert!(inf[k] <= inf[k - 1]); }
                prop_assert!(w_hi[k] >= w_lo[k]);
            }
            let (w1, _) = reflect(&y, 1.0).unwrap();
            prop_assert!(w1.iter().all(|&v| v >= 0.0));
            let (w0, _) = reflect(&y, 0.0).unwrap();
            prop_assert_eq!(&w0, &y);
            let (again, inf1) = reflect(&w1, 1.0).unwrap();
            prop_assert_eq!(&again, &w1);
            prop_assert!(inf1.iter().all(|&v| v == 0.0));
        }

        #[test]
        fn fused_scan_matches_two_pass(y in input_path(), g in 0.0f64..=1.0, u in 0.0f64..3.0, cut in 0usize..64) {
            let (w, _) = reflect(&y, g).unwrap();
            let horizon = cut.min(y.len() - 1);
            prop_assert_eq!(scan_ruin(&y, g, u, horizon), first_passage(&w, u, horizon));
        }

        #[test]
        fn ruin_is_monotone_in_gamma(y in input_path(), u in 0.0f64..3.0) {
            let last = y.len() - 1;
            let mut prev = false;
            for g in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let (w, _) = reflect(&y, g).unwrap();
                let ruined = first_passage(&w, u, last).is_some();
                prop_assert!(ruined || !prev);
                prev = ruined;
            }
        }
    }
}
