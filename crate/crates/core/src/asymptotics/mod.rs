//! Closed-form ruin asymptotics for the γ-reflected fBm process.
//!
//! Constants that have no closed form (`𝓗_{2H}` for `H != 1/2`, `𝓟_{2H}^b`
//! for `H != 1/2`) must be supplied through [`Constants`]; the evaluators
//! never invent them. At `H = 1/2` the exact values `𝓗_1 = 1` and
//! `𝓟_1^b = 1 + 1/b` are used when nothing is supplied.

mod field_theorem;
mod scenario;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::HurstRegime;
use crate::normal;
use crate::reflection::ModelParams;

pub use field_theorem::{
    piterbarg_field_asymptotic, yu_corner_expansion, ConstantSource, CoordinateExpansion,
    FieldExpansion, KnownConstants, MaxLocation, TabulatedConstants,
};
pub use scenario::{infinite_horizon_proxy, Extended, HorizonScenario, RegimeTag, PROXY_SIGMAS};

/// Boundary levels below this are flagged as outside the asymptotic regime.
pub const MIN_BOUNDARY_LEVEL: f64 = 2.0;

/// Relative tolerance for agreement between algebraically equal assemblies.
pub const ASSEMBLY_RTOL: f64 = 1e-12;

/// Injected Pickands/Piterbarg constants for one `(H, γ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// `𝓗_{2H}`
    pub pickands: Option<f64>,
    /// `𝓟_{2H}^{(1-γ)/γ}`
    pub piterbarg: Option<f64>,
}

impl Constants {
    /// Exact Brownian values `𝓗_1 = 1`, `𝓟_1^b = 1 + 1/b` with `b = (1-γ)/γ`.
    pub fn brownian(gamma: f64) -> Self {
        Constants {
            pickands: Some(1.0),
            piterbarg: (gamma > 0.0 && gamma < 1.0).then(|| 1.0 + gamma / (1.0 - gamma)),
        }
    }

    fn pickands_for(&self, params: &ModelParams) -> Result<f64> {
        match (self.pickands, params.hurst.regime()) {
            (Some(v), _) => positive("pickands", v),
            (None, HurstRegime::Brownian) => Ok(1.0),
            (None, _) => Err(Error::MissingConstant("Pickands constant H_{2H}")),
        }
    }

    fn piterbarg_for(&self, params: &ModelParams) -> Result<f64> {
        match (self.piterbarg, params.hurst.regime()) {
            (Some(v), _) => positive("piterbarg", v),
            (None, HurstRegime::Brownian) => Ok(1.0 + params.gamma / (1.0 - params.gamma)),
            (None, _) => Err(Error::MissingConstant("Piterbarg constant P_{2H}^{(1-gamma)/gamma}")),
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::param(name, format!("constant must be positive, got {v}")))
    }
}

/// A closed-form approximation together with everything that went into it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    pub value: f64,
    pub regime: RegimeTag,
    pub constants_used: BTreeMap<String, f64>,
    /// The argument fed to `Ψ`.
    pub boundary_level: f64,
    /// False when the boundary level is below [`MIN_BOUNDARY_LEVEL`] or the
    /// value exceeds 1; the number is then not a usable probability.
    pub regime_reached: bool,
}

impl AsymptoticEstimate {
    fn new(value: f64, regime: RegimeTag, boundary_level: f64, constants_used: BTreeMap<String, f64>) -> Self {
        AsymptoticEstimate {
            value,
            regime,
            regime_reached: boundary_level >= MIN_BOUNDARY_LEVEL && value <= 1.0,
            constants_used,
            boundary_level,
        }
    }
}

/// `t0 = H / (c (1 - H))`, the asymptotic slope of the conditional ruin time.
pub fn t0(params: &ModelParams) -> f64 {
    let h = params.h();
    h / (params.drift * (1.0 - h))
}

/// `A(u) = H^{H+1/2} u^H / ((1-H)^{H+1/2} c^{H+1})`.
pub fn a_u(params: &ModelParams, u: f64) -> f64 {
    let h = params.h();
    h.powf(h + 0.5) * u.powf(h) / ((1.0 - h).powf(h + 0.5) * params.drift.powf(h + 1.0))
}

/// `c0 = c s0 / (1 + c s0)`; lies in `[0, H)` exactly when `s0` lies in `[0, t0)`.
pub fn c0_of(params: &ModelParams, s0: f64) -> Result<f64> {
    let t0 = t0(params);
    if !(s0 >= 0.0 && s0 < t0) {
        return Err(Error::S0OutOfRange { s0, t0 });
    }
    let cs = params.drift * s0;
    let c0 = cs / (1.0 + cs);
    debug_assert!(c0 < params.h());
    Ok(c0)
}

/// Exponent `((1 - 2H)/H)_+` of the boundary-level prefactor.
pub fn prefactor_power(params: &ModelParams) -> f64 {
    match params.hurst.regime() {
        HurstRegime::Rough => (1.0 - 2.0 * params.h()) / params.h(),
        HurstRegime::Brownian | HurstRegime::Smooth => 0.0,
    }
}

/// `(u + c T_u) / T_u^H`.
pub fn finite_boundary_level(params: &ModelParams, u: f64, t_u: f64) -> f64 {
    (u + params.drift * t_u) / t_u.powf(params.h())
}

/// `m(u) = c^H u^{1-H} / (H^H (1-H)^{1-H})`.
pub fn infinite_boundary_level(params: &ModelParams, u: f64) -> f64 {
    let h = params.h();
    params.drift.powf(h) * u.powf(1.0 - h) / (h.powf(h) * (1.0 - h).powf(1.0 - h))
}

/// `D_H` of the unreflected finite-horizon asymptotic.
pub fn d_h(params: &ModelParams, s0: f64, constants: &Constants) -> Result<f64> {
    let c0 = c0_of(params, s0)?;
    let h = params.h();
    Ok(match params.hurst.regime() {
        HurstRegime::Rough => 2f64.powf(-1.0 / (2.0 * h)) / (h - c0) * constants.pickands_for(params)?,
        HurstRegime::Brownian => 4.0 * (1.0 - c0).powi(2) / ((1.0 - 2.0 * c0) * (2.0 - 2.0 * c0)),
        HurstRegime::Smooth => 1.0,
    })
}

/// `M_{H,γ}` for `γ ∈ (0, 1)`.
pub fn m_gamma(params: &ModelParams, s0: f64, constants: &Constants) -> Result<f64> {
    let g = params.gamma;
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::GammaOutOfRange(g));
    }
    let c0 = c0_of(params, s0)?;
    Ok(match params.hurst.regime() {
        HurstRegime::Rough => constants.piterbarg_for(params)?,
        HurstRegime::Brownian => (2.0 - 2.0 * c0) / (2.0 - 2.0 * c0 - g),
        HurstRegime::Smooth => 1.0,
    })
}

/// `M_{H,1}`, the full-reflection factor.
pub fn m_gamma_one(params: &ModelParams, s0: f64, constants: &Constants) -> Result<f64> {
    if params.gamma != 1.0 {
        return Err(Error::GammaOutOfRange(params.gamma));
    }
    let c0 = c0_of(params, s0)?;
    let h = params.h();
    Ok(match params.hurst.regime() {
        HurstRegime::Rough => 2f64.powf(-1.0 / (2.0 * h)) / (h - c0) * constants.pickands_for(params)?,
        HurstRegime::Brownian => (2.0 - 2.0 * c0) / (1.0 - 2.0 * c0),
        HurstRegime::Smooth => 1.0,
    })
}

/// `D_{H,γ}`, the one-step constant of the reflected finite-horizon
/// asymptotic, for `γ ∈ (0, 1)`.
pub fn d_h_gamma(params: &ModelParams, s0: f64, constants: &Constants) -> Result<f64> {
    let g = params.gamma;
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::GammaOutOfRange(g));
    }
    let c0 = c0_of(params, s0)?;
    let h = params.h();
    Ok(match params.hurst.regime() {
        HurstRegime::Rough => {
            2f64.powf(-1.0 / (2.0 * h)) / (h - c0)
                * constants.pickands_for(params)?
                * constants.piterbarg_for(params)?
        }
        HurstRegime::Brownian => 4.0 * (1.0 - c0).powi(2) / ((1.0 - 2.0 * c0) * (2.0 - 2.0 * c0 - g)),
        HurstRegime::Smooth => 1.0,
    })
}

/// `ψ_{0,T_u}(u)` for a horizon with `T_u / u -> s0 ∈ [0, t0)`; `γ` is ignored.
pub fn psi0_finite_at(params: &ModelParams, u: f64, t_u: f64, s0: f64, constants: &Constants) -> Result<AsymptoticEstimate> {
    check_u(u)?;
    if !(t_u > 0.0 && t_u.is_finite()) {
        return Err(Error::param("t_u", format!("must be positive and finite, got {t_u}")));
    }
    let dh = d_h(params, s0, constants)?;
    let level = finite_boundary_level(params, u, t_u);
    let power = prefactor_power(params);
    let value = dh * level.powf(power) * normal::tail(level);

    let mut used = BTreeMap::new();
    used.insert("c0".into(), c0_of(params, s0)?);
    used.insert("D_H".into(), dh);
    used.insert("T_u".into(), t_u);
    used.insert("prefactor_power".into(), power);
    if params.hurst.regime() == HurstRegime::Rough {
        used.insert("H_2H".into(), constants.pickands_for(params)?);
    }
    let regime = if s0 == 0.0 { RegimeTag::Short } else { RegimeTag::Intermediate };
    Ok(AsymptoticEstimate::new(value, regime, level, used))
}

/// `ψ_{0,T_u}(u)` for a Short or Intermediate scenario.
pub fn psi0_finite(params: &ModelParams, u: f64, scenario: &HorizonScenario, constants: &Constants) -> Result<AsymptoticEstimate> {
    let s0 = scenario.s0_limit().ok_or_else(|| {
        Error::RegimeMismatch("finite-horizon formula needs a Short or Intermediate scenario".into())
    })?;
    let t_u = scenario.horizon(params, u)?.expect("finite scenario");
    psi0_finite_at(params, u, t_u, s0, constants)
}

/// `ψ_{0,∞}(u)` given the Pickands constant `𝓗_{2H}`.
pub fn psi0_infinite(params: &ModelParams, u: f64, pickands: f64) -> Result<AsymptoticEstimate> {
    check_u(u)?;
    let pickands = positive("pickands", pickands)?;
    let h = params.h();
    let m = infinite_boundary_level(params, u);
    let lead = 2f64.powf(0.5 - 1.0 / (2.0 * h)) * std::f64::consts::PI.sqrt() / (h * (1.0 - h)).sqrt();
    let value = lead * pickands * m.powf(1.0 / h - 1.0) * normal::tail(m);

    let mut used = BTreeMap::new();
    used.insert("H_2H".into(), pickands);
    used.insert("t0".into(), t0(params));
    used.insert("A_u".into(), a_u(params, u));
    Ok(AsymptoticEstimate::new(value, RegimeTag::Long, m, used))
}

/// `ψ_{γ,T_u}(u)` in any admissible regime.
///
/// Short/Intermediate: `M_{H,γ} ψ_{0,T_u}(u)`, cross-checked against the
/// direct `D_{H,γ}` assembly. Long: `𝓟_{2H}^{(1-γ)/γ} ψ_{0,∞}(u) Φ(x)`.
/// `γ = 1` is only available in the Short/Intermediate regimes.
pub fn psi_gamma(params: &ModelParams, u: f64, scenario: &HorizonScenario, constants: &Constants) -> Result<AsymptoticEstimate> {
    params.validate()?;
    scenario.validate(params)?;
    let g = params.gamma;
    match *scenario {
        HorizonScenario::Short { .. } | HorizonScenario::Intermediate { .. } => {
            let s0 = scenario.s0_limit().expect("finite scenario");
            let mut base = psi0_finite(params, u, scenario, constants)?;
            if g == 0.0 {
                return Ok(base);
            }
            let factor = if g == 1.0 {
                m_gamma_one(params, s0, constants)?
            } else {
                m_gamma(params, s0, constants)?
            };
            let value = factor * base.value;

            let direct_constant = if g == 1.0 {
                d_h(params, s0, constants)? * factor
            } else {
                d_h_gamma(params, s0, constants)?
            };
            let direct = direct_constant * base.boundary_level.powf(prefactor_power(params)) * normal::tail(base.boundary_level);
            if !agree(value, direct) {
                return Err(Error::Internal(format!(
                    "M*psi0 = {value:e} disagrees with D_(H,gamma) assembly {direct:e}"
                )));
            }
            base.constants_used.insert("M_H_gamma".into(), factor);
            base.constants_used.insert("D_H_gamma".into(), direct_constant);
            if params.hurst.regime() == HurstRegime::Rough && g < 1.0 {
                base.constants_used.insert("P_2H".into(), constants.piterbarg_for(params)?);
            }
            Ok(AsymptoticEstimate::new(value, base.regime, base.boundary_level, base.constants_used))
        }
        HorizonScenario::Long { x } => {
            if g == 1.0 {
                return Err(Error::RegimeMismatch(
                    "long-horizon asymptotics are not available for gamma = 1".into(),
                ));
            }
            let pickands = constants.pickands_for(params)?;
            let inf = psi0_infinite(params, u, pickands)?;
            let phi_x = normal::cdf(x.as_f64());
            let factor = if g == 0.0 { 1.0 } else { constants.piterbarg_for(params)? };
            let mut used = inf.constants_used;
            used.insert("Phi_x".into(), phi_x);
            if g > 0.0 {
                used.insert("P_2H".into(), factor);
            }
            Ok(AsymptoticEstimate::new(factor * inf.value * phi_x, RegimeTag::Long, inf.boundary_level, used))
        }
    }
}

fn agree(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= ASSEMBLY_RTOL * a.abs().max(b.abs())
}

fn check_u(u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::param("u", format!("must be positive, got {u}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    UnitExponential,
    TruncatedNormal,
}

/// Limit law of a scaled conditional ruin time.
///
/// The statistic is `scaling * (anchor - τ)` for the exponential laws
/// (`anchor = T_u`) and `scaling * (τ - anchor)` for the truncated normal
/// (`anchor = t0 u`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    pub kind: LimitKind,
    pub scaling: f64,
    pub anchor: f64,
    pub truncation_x: Option<Extended>,
}

impl LimitLaw {
    pub fn unit_exponential(scaling: f64, anchor: f64) -> Self {
        LimitLaw {
            kind: LimitKind::UnitExponential,
            scaling,
            anchor,
            truncation_x: None,
        }
    }

    pub fn statistic(&self, tau: f64) -> f64 {
        match self.kind {
            LimitKind::UnitExponential => self.scaling * (self.anchor - tau),
            LimitKind::TruncatedNormal => self.scaling * (tau - self.anchor),
        }
    }

    /// CDF of the limit: `1 - e^{-y}`, or `Φ(y)/Φ(x)` below the truncation point.
    pub fn cdf(&self, y: f64) -> f64 {
        match self.kind {
            LimitKind::UnitExponential => {
                if y <= 0.0 {
                    0.0
                } else {
                    -(-y).exp_m1()
                }
            }
            LimitKind::TruncatedNormal => {
                let x = self.truncation_x.unwrap_or(Extended::PlusInfinity).as_f64();
                if y >= x {
                    1.0
                } else {
                    normal::cdf(y) / normal::cdf(x)
                }
            }
        }
    }
}

/// Limit law of the conditional ruin time `τ | τ <= T_u` at surplus `u`.
/// Reflection does not enter the law; `γ = 1` is excluded.
pub fn ruin_time_limit_law(params: &ModelParams, u: f64, scenario: &HorizonScenario) -> Result<LimitLaw> {
    check_u(u)?;
    if params.gamma >= 1.0 {
        return Err(Error::GammaOutOfRange(params.gamma));
    }
    let h = params.h();
    let c = params.drift;
    Ok(match *scenario {
        HorizonScenario::Short { .. } => {
            let t_u = scenario.horizon(params, u)?.expect("finite");
            LimitLaw::unit_exponential(h * u * u / t_u.powf(2.0 * h + 1.0), t_u)
        }
        HorizonScenario::Intermediate { s0 } => {
            let t_u = scenario.horizon(params, u)?.expect("finite");
            let lambda = (1.0 + c * s0) * (h - (1.0 - h) * c * s0) / s0.powf(2.0 * h + 1.0);
            LimitLaw::unit_exponential(lambda / u.powf(2.0 * h - 1.0), t_u)
        }
        HorizonScenario::Long { x } => LimitLaw {
            kind: LimitKind::TruncatedNormal,
            scaling: 1.0 / a_u(params, u),
            anchor: t0(params) * u,
            truncation_x: Some(x),
        },
    })
}

/// Factor that makes the conditional maximum loss `L(γ, u)` asymptotically
/// unit exponential.
pub fn loss_limit_scaling(params: &ModelParams, u: f64, scenario: &HorizonScenario) -> Result<f64> {
    check_u(u)?;
    let h = params.h();
    let c = params.drift;
    Ok(match scenario {
        HorizonScenario::Short { .. } | HorizonScenario::Intermediate { .. } => {
            let t_u = scenario.horizon(params, u)?.expect("finite");
            (u + c * t_u) / t_u.powf(2.0 * h)
        }
        HorizonScenario::Long { .. } => {
            scenario.validate(params)?;
            c.powf(2.0 * h) * (1.0 - h).powf(2.0 * h - 1.0) / (h.powf(2.0 * h) * u.powf(2.0 * h - 1.0))
        }
    })
}
