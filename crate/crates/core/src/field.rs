//! Variance landscape of the normalized two-parameter field
//!
//! ```text
//! Y(s, t) = (X(t) - γ X(s)) / (1 + d (t - γ s)),   0 <= s <= t <= 1,
//! ```
//!
//! where `d = c T_u / u`. The finite-horizon ruin asymptotics rest on three
//! facts about this field, certified numerically here:
//!
//! * the variance attains its maximum over the triangle only at `(0, 1)`,
//!   with `V(0, 1) = 1 / (1 + d)`;
//! * along `t = 1`, `(V²(s, 1))' = 2dγ (1 + d(1 - γs))^{-3} f_d(s)` with
//!   `f_d < 0` on `(0, 1)` whenever `d < H / (1 - H)`;
//! * the local expansions of the standard deviation and of the correlation
//!   at `(0, 1)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::asymptotics::yu_corner_expansion;
use crate::error::{Error, Result};
use crate::reflection::ModelParams;

/// Endpoints of the open interval `(0, 1)` used when sweeping `f_d`.
pub const S_MIN: f64 = 1e-6;
pub const S_MAX: f64 = 1.0 - 1e-6;
/// Central-difference step for the derivative identity.
pub const FD_STEP: f64 = 1e-5;
/// Relative tolerance for the derivative identity.
pub const FD_TOLERANCE: f64 = 1e-6;
/// Dyadic radii used by [`expansion_residuals`], as multiples of the start radius.
pub const RESIDUAL_LEVELS: usize = 4;
/// Default starting radius for [`expansion_residuals`].
pub const DEFAULT_RESIDUAL_RADIUS: f64 = 0.01;
pub const MIN_RESOLUTION: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub params: ModelParams,
    /// `d = c T_u / u`.
    pub d: f64,
}

impl FieldParams {
    pub fn new(params: ModelParams, d: f64) -> Result<Self> {
        let fp = FieldParams { params, d };
        fp.validate()?;
        Ok(fp)
    }

    /// `d = fraction · H / (1 - H)`; fractions below 1 are within the
    /// hypothesis of the negativity lemma.
    pub fn from_fraction(params: ModelParams, fraction: f64) -> Result<Self> {
        if !(fraction >= 0.0 && fraction.is_finite()) {
            return Err(Error::param("fraction", format!("must be nonnegative, got {fraction}")));
        }
        Self::new(params, fraction * d_bound(params.h()))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.params.gamma >= 1.0 {
            return Err(Error::GammaOutOfRange(self.params.gamma));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(Error::param("d", format!("must be nonnegative, got {}", self.d)));
        }
        Ok(())
    }

    pub fn fraction(&self) -> f64 {
        self.d / d_bound(self.params.h())
    }

    pub fn in_lemma_scope(&self) -> bool {
        self.fraction() < 1.0
    }

    /// `c(u) = d / (1 + d)`.
    pub fn c_of_u(&self) -> f64 {
        self.d / (1.0 + self.d)
    }
}

/// `H / (1 - H)`.
pub fn d_bound(h: f64) -> f64 {
    h / (1.0 - h)
}

/// `Var(X(t) - γ X(s))`.
pub fn var_z(h: f64, gamma: f64, s: f64, t: f64) -> f64 {
    let p = 2.0 * h;
    let (ts, ss, ds) = (t.powf(p), s.powf(p), (t - s).abs().powf(p));
    ts + gamma * gamma * ss - gamma * (ts + ss - ds)
}

fn check_triangle(s: f64, t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) && s <= t {
        Ok(())
    } else {
        Err(Error::OutOfTriangle { s, t })
    }
}

/// `V²(s, t) = Var(Z(s, t)) / (1 + d(t - γs))²` on `0 <= s <= t <= 1`.
pub fn variance_yu(fp: &FieldParams, s: f64, t: f64) -> Result<f64> {
    check_triangle(s, t)?;
    Ok(variance_unchecked(fp, s, t))
}

fn variance_unchecked(fp: &FieldParams, s: f64, t: f64) -> f64 {
    let g = fp.params.gamma;
    let denom = 1.0 + fp.d * (t - g * s);
    var_z(fp.params.h(), g, s, t) / (denom * denom)
}

/// `f_d(s)`, the sign-carrying factor of `(V²(s, 1))'`.
pub fn f_d(fp: &FieldParams, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::SOutOfRange(s));
    }
    if fp.d <= 0.0 {
        return Err(Error::param("d", "f_d needs d > 0"));
    }
    Ok(f_d_unchecked(fp.params.h(), fp.params.gamma, fp.d, s))
}

fn f_d_unchecked(h: f64, g: f64, d: f64, s: f64) -> f64 {
    let p = 2.0 * h;
    1.0 - g - (g - g * g) * s.powf(p) + g * (1.0 - s).powf(p)
        - h / d * (1.0 + d - d * g * s) * ((1.0 - g) * s.powf(p - 1.0) + (1.0 - s).powf(p - 1.0))
}

/// Closed-form `(V²(s, 1))'` via `f_d`.
pub fn variance_slope_on_top_edge(fp: &FieldParams, s: f64) -> Result<f64> {
    let g = fp.params.gamma;
    let d = fp.d;
    let f = f_d(fp, s)?;
    Ok(2.0 * d * g / (1.0 + d * (1.0 - g * s)).powi(3) * f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub s: f64,
    pub analytic: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
    pub richardson_used: bool,
}

impl DerivativeCheck {
    pub fn passed(&self) -> bool {
        self.relative_error <= FD_TOLERANCE
    }
}

/// Compare `(V²(s, 1))'` from `f_d` with a central difference of
/// [`variance_yu`]; falls back to Richardson extrapolation when the plain
/// difference misses the tolerance.
pub fn check_derivative_identity(fp: &FieldParams, s: f64) -> Result<DerivativeCheck> {
    let analytic = variance_slope_on_top_edge(fp, s)?;
    let h = FD_STEP.min(s / 2.0).min((1.0 - s) / 2.0);
    let v = |x: f64| variance_unchecked(fp, x, 1.0);
    let central = |h: f64| (v(s + h) - v(s - h)) / (2.0 * h);
    let rel = |fd: f64| {
        let scale = analytic.abs().max(fd.abs());
        if scale == 0.0 {
            0.0
        } else {
            (fd - analytic).abs() / scale
        }
    };
    let plain = central(h);
    let mut out = DerivativeCheck {
        s,
        analytic,
        finite_difference: plain,
        relative_error: rel(plain),
        richardson_used: false,
    };
    if !out.passed() {
        let extrapolated = (4.0 * central(h / 2.0) - plain) / 3.0;
        out.finite_difference = extrapolated;
        out.relative_error = rel(extrapolated);
        out.richardson_used = true;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityCase {
    pub hurst: f64,
    pub gamma: f64,
    pub fraction: f64,
    pub max_f_d: f64,
    pub argmax_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityReport {
    pub s_points: usize,
    /// Cases with `fraction < 1`.
    pub in_scope: Vec<NegativityCase>,
    /// Cases with `fraction >= 1`, outside the lemma's hypothesis.
    pub out_of_scope: Vec<NegativityCase>,
    /// Largest `f_d` over all in-scope cases, with its location.
    pub worst: Option<NegativityCase>,
    pub passed: bool,
    /// Set when out-of-scope fractions were requested.
    pub scope_warning: bool,
}

/// `s_points` equispaced points in `[S_MIN, S_MAX]`.
pub fn s_sweep(s_points: usize) -> Vec<f64> {
    match s_points {
        0 => vec![],
        1 => vec![0.5],
        n => (0..n)
            .map(|i| S_MIN + (S_MAX - S_MIN) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Evaluate `f_d` over every `(H, γ, fraction)` combination and `s_points`
/// values of `s`; passes iff every in-scope maximum is negative.
pub fn certify_lemma_negativity(
    hurst_grid: &[f64],
    gamma_grid: &[f64],
    fraction_grid: &[f64],
    s_points: usize,
) -> Result<NegativityReport> {
    for &h in hurst_grid {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::HurstOutOfRange(h));
        }
    }
    for &g in gamma_grid {
        if !(0.0..1.0).contains(&g) {
            return Err(Error::GammaOutOfRange(g));
        }
    }
    for &f in fraction_grid {
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::param("fraction", format!("must be positive, got {f}")));
        }
    }
    if s_points == 0 {
        return Err(Error::param("s_points", "need at least one point"));
    }
    let ss = s_sweep(s_points);
    let combos: Vec<(f64, f64, f64)> = hurst_grid
        .iter()
        .flat_map(|&h| gamma_grid.iter().flat_map(move |&g| fraction_grid.iter().map(move |&f| (h, g, f))))
        .collect();
    let cases: Vec<NegativityCase> = combos
        .par_iter()
        .map(|&(h, g, fraction)| {
            let d = fraction * d_bound(h);
            let (max_f_d, argmax_s) = ss
                .iter()
                .map(|&s| (f_d_unchecked(h, g, d, s), s))
                .fold((f64::NEG_INFINITY, f64::NAN), |acc, x| if x.0 > acc.0 { x } else { acc });
            NegativityCase {
                hurst: h,
                gamma: g,
                fraction,
                max_f_d,
                argmax_s,
            }
        })
        .collect();
    let (in_scope, out_of_scope): (Vec<_>, Vec<_>) = cases.into_iter().partition(|c| c.fraction < 1.0);
    let worst = in_scope
        .iter()
        .cloned()
        .reduce(|a, b| if b.max_f_d > a.max_f_d { b } else { a });
    let passed = !in_scope.is_empty() && in_scope.iter().all(|c| c.max_f_d < 0.0);
    Ok(NegativityReport {
        s_points,
        scope_warning: !out_of_scope.is_empty(),
        in_scope,
        out_of_scope,
        worst,
        passed,
    })
}

/// The sweep used for certification: `H ∈ {0.1, …, 0.9}`,
/// `γ ∈ {0.05, …, 0.95}`, `fraction ∈ {0.1, …, 0.9, 0.99}`, 1000 points.
pub fn default_negativity_grids() -> (Vec<f64>, Vec<f64>, Vec<f64>, usize) {
    let hurst = (1..=9).map(|i| i as f64 / 10.0).collect();
    let gamma = (1..=19).map(|i| i as f64 * 0.05).collect();
    let mut fraction: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    fraction.push(0.99);
    (hurst, gamma, fraction, 1000)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceMax {
    pub s: f64,
    pub t: f64,
    /// Standard deviation `V` at the grid maximizer.
    pub v: f64,
    pub resolution: usize,
    /// `V(0, 1) = 1 / (1 + d)`.
    pub v_corner: f64,
}

impl VarianceMax {
    /// Maximizer within one grid cell of `(0, 1)` and `V*` within `1e-6` of
    /// `1 / (1 + d)`.
    pub fn at_corner(&self) -> bool {
        let cell = 1.0 / self.resolution as f64;
        self.s <= cell + 1e-12 && 1.0 - self.t <= cell + 1e-12 && (self.v - self.v_corner).abs() <= 1e-6
    }
}

/// Grid search for the maximizer of `V²` over the triangle
/// `{0 <= s <= t <= 1}` with `resolution` cells per axis. Ties resolve to
/// the smallest `t`, then the smallest `s`.
pub fn locate_variance_max(fp: &FieldParams, resolution: usize) -> Result<VarianceMax> {
    fp.validate()?;
    if resolution < MIN_RESOLUTION {
        return Err(Error::param(
            "resolution",
            format!("need at least {MIN_RESOLUTION} cells per axis, got {resolution}"),
        ));
    }
    let r = resolution as f64;
    let rows: Vec<(f64, usize, usize)> = (0..=resolution)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 / r;
            (0..=j)
                .map(|i| (variance_unchecked(fp, i as f64 / r, t), i, j))
                .fold((f64::NEG_INFINITY, 0, j), |acc, x| if x.0 > acc.0 { x } else { acc })
        })
        .collect();
    let (v2, i, j) = rows
        .into_iter()
        .fold((f64::NEG_INFINITY, 0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    Ok(VarianceMax {
        s: i as f64 / r,
        t: j as f64 / r,
        v: v2.sqrt(),
        resolution,
        v_corner: 1.0 / (1.0 + fp.d),
    })
}

/// `(s, t, V²)` over the triangle grid, row by row in `t`.
pub fn landscape(fp: &FieldParams, resolution: usize) -> Result<Vec<(f64, f64, f64)>> {
    fp.validate()?;
    if resolution == 0 {
        return Err(Error::param("resolution", "must be positive"));
    }
    let r = resolution as f64;
    Ok((0..=resolution)
        .flat_map(|j| (0..=j).map(move |i| (i as f64 / r, j as f64 / r)))
        .map(|(s, t)| (s, t, variance_unchecked(fp, s, t)))
        .collect())
}

pub fn write_landscape_csv<W: Write>(rows: &[(f64, f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "t", "V2"])?;
    for (s, t, v2) in rows {
        w.write_record([format!("{s:.6}"), format!("{t:.6}"), format!("{v2:.16e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Direction of approach to `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Approach {
    /// `(0, 1 - r)`.
    Time,
    /// `(r, 1)`.
    Reflection,
    /// `(r, 1 - r)`.
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSeries {
    pub approach: Approach,
    pub radii: Vec<f64>,
    /// `|V/V(0,1) - expansion| / (1 - t + s^β)`.
    pub ratios: Vec<f64>,
    pub monotone_decreasing: bool,
    /// Least-squares slope of `ln ratio` against `ln radius`; positive when
    /// the residual vanishes, roughly the order of the neglected terms.
    pub decay_exponent: f64,
}

impl ResidualSeries {
    fn new(approach: Approach, radii: Vec<f64>, ratios: Vec<f64>) -> Self {
        let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        ResidualSeries {
            approach,
            monotone_decreasing: decreasing(&ratios),
            decay_exponent: sxy / sxx,
            radii,
            ratios,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub hurst: f64,
    pub gamma: f64,
    pub d: f64,
    /// Coefficients of `1 - A_t (1 - t) - A_s s^β`.
    pub a_t: f64,
    pub a_s: f64,
    pub beta_s: f64,
    pub std_dev: Vec<ResidualSeries>,
    /// `|1 - corr - (|Δt|^{2H} + γ²|Δs|^{2H})/2| / ((|Δt|^{2H} + γ²|Δs|^{2H})/2)`
    /// between `(r, 1 - r)` and `(2r, 1 - 2r)`.
    pub correlation: ResidualSeries,
    pub passed: bool,
}

fn decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Standard-deviation and correlation expansion residuals at `(0, 1)` over
/// the dyadic radii `radius, radius/2, radius/4, radius/8`.
///
/// `passed` requires every residual ratio to decrease strictly over the four
/// radii. The neglected terms can carry opposite signs (for `H` slightly
/// above 1/2, `r^{2-2H}` against `r` in the correlation), so `|ratio|` may dip
/// through zero before it settles; `decay_exponent` shows the trend in
/// that case.
pub fn expansion_residuals(fp: &FieldParams, radius: f64) -> Result<ResidualReport> {
    fp.validate()?;
    if !(radius > 0.0 && radius <= 0.1) {
        return Err(Error::param("radius", format!("must lie in (0, 0.1], got {radius}")));
    }
    let h = fp.params.h();
    let g = fp.params.gamma;
    let c = fp.c_of_u();
    if c >= h {
        return Err(Error::BadExpansionSpec(format!("d = {} puts c(u) = {c} at or above H", fp.d)));
    }
    let (a_s, beta_s, a_t) = if g > 0.0 {
        let e = yu_corner_expansion(&fp.params, c)?;
        (e.first.a, e.first.beta, e.second.a)
    } else {
        (0.0, 1.0, h - c)
    };
    let v0 = variance_unchecked(fp, 0.0, 1.0).sqrt();
    let radii: Vec<f64> = (0..RESIDUAL_LEVELS).map(|k| radius / 2f64.powi(k as i32)).collect();

    let std_dev: Vec<ResidualSeries> = [Approach::Time, Approach::Reflection, Approach::Diagonal]
        .into_iter()
        .filter(|a| g > 0.0 || *a == Approach::Time)
        .map(|approach| {
            let ratios: Vec<f64> = radii
                .iter()
                .map(|&r| {
                    let (s, t) = match approach {
                        Approach::Time => (0.0, 1.0 - r),
                        Approach::Reflection => (r, 1.0),
                        Approach::Diagonal => (r, 1.0 - r),
                    };
                    let exact = variance_unchecked(fp, s, t).sqrt() / v0;
                    let approx = 1.0 - a_t * (1.0 - t) - a_s * s.powf(beta_s);
                    (exact - approx).abs() / ((1.0 - t) + s.powf(beta_s))
                })
                .collect();
            ResidualSeries::new(approach, radii.clone(), ratios)
        })
        .collect();

    let corr_ratios: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let (s1, t1, s2, t2) = (r, 1.0 - r, 2.0 * r, 1.0 - 2.0 * r);
            let exact = 1.0 - correlation_z(h, g, (s1, t1), (s2, t2));
            let approx = 0.5 * ((t1 - t2).abs().powf(2.0 * h) + g * g * (s1 - s2).abs().powf(2.0 * h));
            (exact - approx).abs() / approx
        })
        .collect();
    let correlation = ResidualSeries::new(Approach::Diagonal, radii, corr_ratios);
    let passed = std_dev.iter().all(|s| s.monotone_decreasing) && correlation.monotone_decreasing;
    Ok(ResidualReport {
        hurst: h,
        gamma: g,
        d: fp.d,
        a_t,
        a_s,
        beta_s,
        std_dev,
        correlation,
        passed,
    })
}

/// `Corr(Z(s, t), Z(s', t'))` for `Z(s, t) = X(t) - γ X(s)`.
pub fn correlation_z(h: f64, gamma: f64, (s1, t1): (f64, f64), (s2, t2): (f64, f64)) -> f64 {
    let p = 2.0 * h;
    let r = |a: f64, b: f64| 0.5 * (a.powf(p) + b.powf(p) - (a - b).abs().powf(p));
    let cov = r(t1, t2) - gamma * r(t1, s2) - gamma * r(s1, t2) + gamma * gamma * r(s1, s2);
    cov / (var_z(h, gamma, s1, t1) * var_z(h, gamma, s2, t2)).sqrt()
}
