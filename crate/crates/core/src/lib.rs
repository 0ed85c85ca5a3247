//! Reflected fractional Brownian motion with linear drift: exact path
//! simulation, ruin asymptotics, Pickands/Piterbarg constants, certification
//! of the variance landscape behind the finite-horizon asymptotics, and
//! Monte Carlo experiments that compare the two.
//!
//! Module map:
//!
//! * [`fbm`]: Hurst index, grids, circulant-embedding and Cholesky samplers.
//! * [`reflection`]: the γ-reflected process and first-passage bookkeeping.
//! * [`asymptotics`]: closed-form ruin, ruin-time and loss asymptotics, and
//!   the two-parameter Gaussian field theorem they rest on.
//! * [`constants`]: Monte Carlo estimators of Pickands/Piterbarg constants.
//! * [`field`]: numerical certification of the field's variance landscape.
//! * [`monte_carlo`]: replicated experiments and MC-vs-asymptotic reports.
//! * [`normal`], [`stats`], [`rng`]: numerical and statistical helpers.

pub mod asymptotics;
pub mod constants;
pub mod error;
pub mod fbm;
pub mod field;
pub mod monte_carlo;
pub mod normal;
pub mod reflection;
pub mod rng;
pub mod stats;

pub use asymptotics::{AsymptoticEstimate, Constants, Extended, HorizonScenario, LimitLaw, RegimeTag};
pub use constants::{ConstantEstimate, ConstantKind, EstimatorMethod};
pub use error::{Error, Result};
pub use fbm::{FbmPath, GridSpec, HurstIndex, HurstRegime};
pub use field::FieldParams;
pub use monte_carlo::{ConditionalSample, ExperimentSpec, McEstimate};
pub use reflection::{ModelParams, RuinOutcome};
