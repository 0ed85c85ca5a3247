use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reflection::ModelParams;

use super::{a_u, t0};

/// A real number or `+∞`. Serialized as a JSON number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExtendedRepr", into = "ExtendedRepr")]
pub enum Extended {
    Finite(f64),
    PlusInfinity,
}

impl Extended {
    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::PlusInfinity)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Extended::Finite(x) => x,
            Extended::PlusInfinity => f64::INFINITY,
        }
    }
}

impl From<f64> for Extended {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            Extended::PlusInfinity
        } else {
            Extended::Finite(x)
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::PlusInfinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Extended {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(Extended::PlusInfinity),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Extended::Finite)
                .ok_or_else(|| Error::param("x", format!("expected a real number or `inf`, got `{s}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtendedRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<ExtendedRepr> for Extended {
    type Error = Error;
    fn try_from(r: ExtendedRepr) -> Result<Self> {
        match r {
            ExtendedRepr::Number(x) if x.is_finite() => Ok(Extended::Finite(x)),
            ExtendedRepr::Number(x) => Err(Error::param("x", format!("non-finite number {x}"))),
            ExtendedRepr::Text(s) => s.parse(),
        }
    }
}

impl From<Extended> for ExtendedRepr {
    fn from(e: Extended) -> Self {
        match e {
            Extended::Finite(x) => ExtendedRepr::Number(x),
            Extended::PlusInfinity => ExtendedRepr::Text("inf".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTag {
    Short,
    Intermediate,
    Long,
}

/// How the horizon `T_u` grows with the surplus `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum HorizonScenario {
    /// `T_u = coefficient * u^exponent` with `exponent < 1`, so `T_u / u -> 0`.
    Short { coefficient: f64, exponent: f64 },
    /// `T_u = s0 * u` with `0 < s0 < t0`.
    Intermediate { s0: f64 },
    /// `T_u = t0 u + x A(u)`; `x = +∞` means the infinite horizon.
    Long { x: Extended },
}

/// Safety factor in the infinite-horizon proxy `c T >= u + k T^H`.
pub const PROXY_SIGMAS: f64 = 6.0;

impl HorizonScenario {
    pub fn tag(&self) -> RegimeTag {
        match self {
            HorizonScenario::Short { .. } => RegimeTag::Short,
            HorizonScenario::Intermediate { .. } => RegimeTag::Intermediate,
            HorizonScenario::Long { .. } => RegimeTag::Long,
        }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        match *self {
            HorizonScenario::Short {
                coefficient,
                exponent,
            } => {
                if !(coefficient > 0.0 && coefficient.is_finite()) {
                    return Err(Error::param("coefficient", format!("must be positive, got {coefficient}")));
                }
                if !((0.0..1.0).contains(&exponent)) {
                    return Err(Error::param("exponent", format!("must lie in [0, 1), got {exponent}")));
                }
            }
            HorizonScenario::Intermediate { s0 } => {
                let t0 = t0(params);
                if !(s0 > 0.0 && s0 < t0) {
                    return Err(Error::S0OutOfRange { s0, t0 });
                }
            }
            HorizonScenario::Long { .. } => {}
        }
        Ok(())
    }

    /// `lim T_u / u`: 0 for Short, `s0` for Intermediate, none for Long.
    pub fn s0_limit(&self) -> Option<f64> {
        match *self {
            HorizonScenario::Short { .. } => Some(0.0),
            HorizonScenario::Intermediate { s0 } => Some(s0),
            HorizonScenario::Long { .. } => None,
        }
    }

    /// `T_u` at this `u`; `None` for the infinite horizon.
    pub fn horizon(&self, params: &ModelParams, u: f64) -> Result<Option<f64>> {
        self.validate(params)?;
        let t = match *self {
            HorizonScenario::Short {
                coefficient,
                exponent,
            } => coefficient * u.powf(exponent),
            HorizonScenario::Intermediate { s0 } => s0 * u,
            HorizonScenario::Long {
                x: Extended::Finite(x),
            } => t0(params) * u + x * a_u(params, u),
            HorizonScenario::Long {
                x: Extended::PlusInfinity,
            } => return Ok(None),
        };
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::RegimeMismatch(format!(
                "horizon T_u = {t} is not positive at u = {u}"
            )));
        }
        Ok(Some(t))
    }

    /// `T_u`, replacing the infinite horizon by [`infinite_horizon_proxy`].
    pub fn simulation_horizon(&self, params: &ModelParams, u: f64) -> Result<f64> {
        Ok(match self.horizon(params, u)? {
            Some(t) => t,
            None => infinite_horizon_proxy(params, u),
        })
    }
}

/// Smallest `T` with `c T >= u + 6 T^H`. Beyond it the drift keeps the
/// path below `u` with overwhelming probability.
pub fn infinite_horizon_proxy(params: &ModelParams, u: f64) -> f64 {
    let c = params.drift;
    let h = params.h();
    let g = |t: f64| c * t - PROXY_SIGMAS * t.powf(h) - u;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
