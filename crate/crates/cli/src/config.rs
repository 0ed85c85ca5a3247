//! Run configuration: a flat JSON file whose keys double as command-line
//! flags. Flags win over the file; the resolved configuration (file, flags
//! and defaults) is written beside every run's results.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fbm_ruin::asymptotics::Constants;
use fbm_ruin::{EstimatorMethod, Extended, HorizonScenario, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioName {
    Short,
    Intermediate,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Tilted,
}

impl From<Method> for EstimatorMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Direct => EstimatorMethod::Direct,
            Method::Tilted => EstimatorMethod::Tilted,
        }
    }
}

/// Every tunable of every command. Unset keys take the command's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed of all random streams.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    /// Hurst index H in (0, 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    /// Drift c > 0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
    /// Reflection strength γ in [0, 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Initial surplus u.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    /// Horizon regime.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioName>,
    /// Intermediate regime: T_u = s0 u.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    /// Long regime: T_u = t0 u + x A(u); `inf` for the infinite horizon.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Extended>,
    /// Short regime: T_u = coefficient u^exponent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
    /// Short regime exponent in [0, 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// Number of grid steps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    /// Grid horizon; must cover T_u. Defaults to T_u.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Replications.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    /// Surplus levels for ladders, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_ladder: Option<Vec<f64>>,
    /// Pickands constant H_{2H} fed to the asymptotics.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pickands: Option<f64>,
    /// Piterbarg constant P_{2H}^{(1-γ)/γ} fed to the asymptotics.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub piterbarg: Option<f64>,
    /// Index α values for constant sweeps, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    /// Piterbarg drift parameters b, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs: Option<Vec<f64>>,
    /// Truncation horizon S of the constant estimators.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_horizon: Option<f64>,
    /// Grid step of the constant estimators.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    /// Constant estimator.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// d as a fraction of H / (1 - H).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_fraction: Option<f64>,
    /// Cells per axis of the variance grid search.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Largest radius of the expansion residual table.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Hurst values of the lemma sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurst_grid: Option<Vec<f64>>,
    /// γ values of the lemma sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_grid: Option<Vec<f64>>,
    /// d fractions of the lemma sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction_grid: Option<Vec<f64>>,
    /// Points in s per lemma case.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_points: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            let inner = e.into_inner();
            let key = if key == "." { unknown_key(&inner.to_string()).unwrap_or(key) } else { key };
            CliError::config(key, inner.to_string())
        })
    }

    /// Values of `top` where set, else values of `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top;
            seed, out, hurst, drift, gamma, u, scenario, s0, x, coefficient, exponent,
            grid_n, horizon, reps, u_ladder, pickands, piterbarg, alphas, bs, s_horizon,
            grid_step, method, d_fraction, resolution, radius, hurst_grid, gamma_grid,
            fraction_grid, s_points,
        )
    }

    pub fn model(&mut self, hurst: f64, drift: f64, gamma: f64) -> Result<ModelParams, CliError> {
        let h = *self.hurst.get_or_insert(hurst);
        let c = *self.drift.get_or_insert(drift);
        let g = *self.gamma.get_or_insert(gamma);
        Ok(ModelParams::new(h, c, g)?)
    }

    /// Scenario with its parameters, filling the unset ones.
    pub fn scenario(&mut self, default: ScenarioName) -> HorizonScenario {
        match *self.scenario.get_or_insert(default) {
            ScenarioName::Short => HorizonScenario::Short {
                coefficient: *self.coefficient.get_or_insert(0.1),
                exponent: *self.exponent.get_or_insert(0.0),
            },
            ScenarioName::Intermediate => HorizonScenario::Intermediate {
                s0: *self.s0.get_or_insert(0.5),
            },
            ScenarioName::Long => HorizonScenario::Long {
                x: *self.x.get_or_insert(Extended::PlusInfinity),
            },
        }
    }

    pub fn constants(&self) -> Constants {
        Constants {
            pickands: self.pickands,
            piterbarg: self.piterbarg,
        }
    }
}

/// The key named by serde's "unknown field `k`" message.
fn unknown_key(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}
