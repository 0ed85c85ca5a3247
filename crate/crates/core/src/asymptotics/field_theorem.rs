//! Tail asymptotics for a two-parameter Gaussian field whose standard
//! deviation and correlation have power-law expansions at the unique
//! variance maximizer:
//!
//! ```text
//! σ(s,t)        = 1 - A_1 |s - s*|^β_1 - A_2 |t - t*|^β_2 + ...
//! 1 - r(·, ·')  =     B_1 |s - s'|^α_1 + B_2 |t - t'|^α_2 + ...
//! ```
//!
//! `P(sup > u) ~ F_1(u) F_2(u) Ψ(u)`, where each factor depends on how the
//! coordinate's `α_i` compares with `β_i`.
//!
//! In the `α_i = β_i` case the Piterbarg constant has index `α_i` for both
//! coordinates; the printed statement uses `α_1` in the second coordinate's
//! boundary cell, which does not match the interior cell next to it.

use serde::{Deserialize, Serialize};
use libm::tgamma as gamma;

use crate::constants::ConstantKind;
use crate::error::{Error, Result};
use crate::fbm::HurstRegime;
use crate::normal;
use crate::reflection::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxLocation {
    /// Maximizer coordinate at 0 or 1.
    Boundary,
    /// Maximizer coordinate strictly inside `(0, 1)`.
    Interior,
}

impl MaxLocation {
    fn multiplicity(self) -> f64 {
        match self {
            MaxLocation::Boundary => 1.0,
            MaxLocation::Interior => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoordinateExpansion {
    /// Standard-deviation coefficient `A_i`.
    pub a: f64,
    /// Standard-deviation exponent `β_i`.
    pub beta: f64,
    /// Correlation coefficient `B_i`.
    pub b: f64,
    /// Correlation exponent `α_i ∈ (0, 2]`.
    pub alpha: f64,
    pub location: MaxLocation,
}

impl CoordinateExpansion {
    fn validate(&self, which: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::BadExpansionSpec(format!("coordinate {which}: {msg}")));
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return bad(format!("alpha must lie in (0, 2], got {}", self.alpha));
        }
        for (name, v) in [("beta", self.beta), ("A", self.a), ("B", self.b)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }

    /// `F_i(u)`.
    pub fn factor(&self, level: f64, constants: &dyn ConstantSource) -> Result<f64> {
        if self.alpha < self.beta {
            let h = constants
                .get(ConstantKind::Pickands, self.alpha, None)
                .ok_or(Error::MissingConstant("Pickands constant H_alpha"))?;
            Ok(self.location.multiplicity()
                * h
                * self.b.powf(1.0 / self.alpha)
                * self.a.powf(-1.0 / self.beta)
                * gamma(1.0 / self.beta + 1.0)
                * level.powf(2.0 / self.alpha - 2.0 / self.beta))
        } else if self.alpha == self.beta {
            let kind = match self.location {
                MaxLocation::Boundary => ConstantKind::Piterbarg,
                MaxLocation::Interior => ConstantKind::TildePiterbarg,
            };
            constants
                .get(kind, self.alpha, Some(self.a / self.b))
                .ok_or(Error::MissingConstant("Piterbarg constant P_alpha^(A/B)"))
        } else {
            Ok(1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldExpansion {
    pub first: CoordinateExpansion,
    pub second: CoordinateExpansion,
}

impl FieldExpansion {
    pub fn validate(&self) -> Result<()> {
        self.first.validate(1)?;
        self.second.validate(2)
    }

    /// `F_1(u) F_2(u)`.
    pub fn prefactor(&self, level: f64, constants: &dyn ConstantSource) -> Result<f64> {
        self.validate()?;
        Ok(self.first.factor(level, constants)? * self.second.factor(level, constants)?)
    }
}

/// `F_1(u) F_2(u) Ψ(u)`.
pub fn piterbarg_field_asymptotic(spec: &FieldExpansion, level: f64, constants: &dyn ConstantSource) -> Result<f64> {
    Ok(spec.prefactor(level, constants)? * normal::tail(level))
}

/// Expansion of the standardized field `Y_u / V(0,1)` at its maximizer
/// `(s, t) = (0, 1)`, in the limit `c(u) -> c0`.
///
/// Coordinate 1 is `s` (reflection), coordinate 2 is `t` (time):
///
/// | H     | A_1            | β_1 | A_2    | β_2 | B_1   | α_1 | B_2 | α_2 |
/// |-------|----------------|-----|--------|-----|-------|-----|-----|-----|
/// | > 1/2 | γ(H - c0)      | 1   | H - c0 | 1   | γ²/2  | 2H  | 1/2 | 2H  |
/// | = 1/2 | γ(1 - γ/2 - c0)| 1   | 1/2-c0 | 1   | γ²/2  | 1   | 1/2 | 1   |
/// | < 1/2 | (γ - γ²)/2     | 2H  | H - c0 | 1   | γ²/2  | 2H  | 1/2 | 2H  |
pub fn yu_corner_expansion(params: &ModelParams, c0: f64) -> Result<FieldExpansion> {
    let g = params.gamma;
    let h = params.h();
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::GammaOutOfRange(g));
    }
    if !(c0 >= 0.0 && c0 < h) {
        return Err(Error::BadExpansionSpec(format!("c0 = {c0} outside [0, H)")));
    }
    let (a1, beta1) = match params.hurst.regime() {
        HurstRegime::Smooth => (g * (h - c0), 1.0),
        HurstRegime::Brownian => (g * (1.0 - g / 2.0 - c0), 1.0),
        HurstRegime::Rough => ((g - g * g) / 2.0, 2.0 * h),
    };
    let alpha = 2.0 * h;
    Ok(FieldExpansion {
        first: CoordinateExpansion {
            a: a1,
            beta: beta1,
            b: g * g / 2.0,
            alpha,
            location: MaxLocation::Boundary,
        },
        second: CoordinateExpansion {
            a: h - c0,
            beta: 1.0,
            b: 0.5,
            alpha,
            location: MaxLocation::Boundary,
        },
    })
}

/// Lookup of Pickands/Piterbarg constants by `(kind, α, b)`.
pub trait ConstantSource {
    fn get(&self, kind: ConstantKind, alpha: f64, b: Option<f64>) -> Option<f64>;
}

/// The constants with closed forms: `𝓗_1 = 1`, `𝓗_2 = 1/√π`,
/// `𝓟_1^b = 1 + 1/b`, `𝓟_2^b = (1 + √((1+b)/b))/2`, `𝓟̃_2^b = √((1+b)/b)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KnownConstants;

impl ConstantSource for KnownConstants {
    fn get(&self, kind: ConstantKind, alpha: f64, b: Option<f64>) -> Option<f64> {
        match (kind, alpha, b) {
            (ConstantKind::Pickands, a, _) if a == 1.0 => Some(1.0),
            (ConstantKind::Pickands, a, _) if a == 2.0 => Some(1.0 / std::f64::consts::PI.sqrt()),
            (ConstantKind::Piterbarg, a, Some(b)) if a == 1.0 && b > 0.0 => Some(1.0 + 1.0 / b),
            (ConstantKind::Piterbarg, a, Some(b)) if a == 2.0 && b > 0.0 => {
                Some(0.5 * (1.0 + ((1.0 + b) / b).sqrt()))
            }
            (ConstantKind::TildePiterbarg, a, Some(b)) if a == 2.0 && b > 0.0 => Some(((1.0 + b) / b).sqrt()),
            _ => None,
        }
    }
}

/// Explicit table (e.g. Monte Carlo estimates) with closed forms as fallback.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TabulatedConstants {
    pub entries: Vec<(ConstantKind, f64, Option<f64>, f64)>,
}

impl TabulatedConstants {
    pub fn with(mut self, kind: ConstantKind, alpha: f64, b: Option<f64>, value: f64) -> Self {
        self.entries.push((kind, alpha, b, value));
        self
    }
}

impl ConstantSource for TabulatedConstants {
    fn get(&self, kind: ConstantKind, alpha: f64, b: Option<f64>) -> Option<f64> {
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(1.0);
        self.entries
            .iter()
            .find(|(k, a, bb, _)| {
                *k == kind
                    && close(*a, alpha)
                    && match (bb, b) {
                        (Some(x), Some(y)) => close(*x, y),
                        (None, None) => true,
                        _ => false,
                    }
            })
            .map(|e| e.3)
            .or_else(|| KnownConstants.get(kind, alpha, b))
    }
}
