//! Exact samplers for fractional Gaussian noise and fractional Brownian motion
//! on uniform grids.
//!
//! The workhorse is [`FgnGenerator`], a circulant-embedding (Davies–Harte)
//! sampler: one complex FFT of length `2n` yields two independent unit-step
//! fGn sequences of length `n`. [`CholeskySampler`] factorizes the dense
//! covariance of the path and serves as an independent oracle on small grids.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Hurst index `H`, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HurstIndex(f64);

impl HurstIndex {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(HurstIndex(value))
        } else {
            Err(Error::HurstOutOfRange(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Which side of 1/2 the index lies on, decided exactly.
    pub fn regime(self) -> HurstRegime {
        if self.0 < 0.5 {
            HurstRegime::Rough
        } else if self.0 == 0.5 {
            HurstRegime::Brownian
        } else {
            HurstRegime::Smooth
        }
    }
}

impl TryFrom<f64> for HurstIndex {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        HurstIndex::new(value)
    }
}

impl From<HurstIndex> for f64 {
    fn from(h: HurstIndex) -> f64 {
        h.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HurstRegime {
    /// `H < 1/2`
    Rough,
    /// `H = 1/2`
    Brownian,
    /// `H > 1/2`
    Smooth,
}

/// Uniform grid `t_k = k * horizon / n_steps`, `k = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_steps: usize,
    pub horizon: f64,
}

impl GridSpec {
    pub fn new(n_steps: usize, horizon: f64) -> Result<Self> {
        let grid = GridSpec { n_steps, horizon };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "n_steps must be at least 2, got {}",
                self.n_steps
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "horizon must be positive and finite, got {}",
                self.horizon
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.horizon / self.n_steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| self.time(k)).collect()
    }

    /// Largest grid index whose time does not exceed `t`.
    pub fn index_at_or_before(&self, t: f64) -> usize {
        if t >= self.horizon {
            return self.n_steps;
        }
        // relative slack absorbs t = k*step computed in floating point
        let k = (t / self.step() * (1.0 + 1e-12)).floor();
        (k.max(0.0) as usize).min(self.n_steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FbmPath {
    pub grid: GridSpec,
    pub hurst: HurstIndex,
    pub values: Vec<f64>,
}

impl FbmPath {
    /// Dump as CSV with header `t,value`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"])?;
        for (k, v) in self.values.iter().enumerate() {
            w.write_record([
                format!("{:.16e}", self.grid.time(k)),
                format!("{:.16e}", v),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Covariance of fGn increments of width `step` at `lag` steps apart.
pub fn fgn_covariance(hurst: HurstIndex, lag: usize, step: f64) -> f64 {
    let two_h = 2.0 * hurst.value();
    let k = lag as f64;
    let lower = if lag == 0 { 1.0 } else { (k - 1.0).powf(two_h) };
    step.powf(two_h) * 0.5 * ((k + 1.0).powf(two_h) + lower - 2.0 * k.powf(two_h))
}

/// Eigenvalues in `[-EIGEN_CLIP, 0)` are treated as rounding noise.
pub const EIGEN_CLIP: f64 = 1e-10;

/// Circulant-embedding sampler of unit-step fGn of a fixed length.
pub struct FgnGenerator {
    hurst: HurstIndex,
    n: usize,
    /// `sqrt(λ_k / 2n)`
    scales: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FgnGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnGenerator")
            .field("hurst", &self.hurst)
            .field("n", &self.n)
            .finish()
    }
}

impl FgnGenerator {
    pub fn new(hurst: HurstIndex, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 increments, got {n}"
            )));
        }
        let m = 2 * n;
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(m);

        let mut row: Vec<Complex64> = (0..m)
            .map(|j| Complex64::new(fgn_covariance(hurst, j.min(m - j), 1.0), 0.0))
            .collect();
        fft.process(&mut row);

        let scales = row
            .iter()
            .enumerate()
            .map(|(index, z)| {
                let mut value = z.re;
                if value < 0.0 {
                    if value < -EIGEN_CLIP {
                        return Err(Error::NegativeEigenvalue { index, value });
                    }
                    value = 0.0;
                }
                Ok((value / m as f64).sqrt())
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(FgnGenerator {
            hurst,
            n,
            scales,
            fft,
        })
    }

    /// Process-wide cache keyed by `(H, n)`.
    pub fn shared(hurst: HurstIndex, n: usize) -> Result<Arc<Self>> {
        type Cache = RwLock<HashMap<(u64, usize), Arc<FgnGenerator>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (hurst.value().to_bits(), n);
        if let Some(g) = cache.read().expect("fgn cache poisoned").get(&key) {
            return Ok(Arc::clone(g));
        }
        let generator = Arc::new(FgnGenerator::new(hurst, n)?);
        let mut guard = cache.write().expect("fgn cache poisoned");
        Ok(Arc::clone(guard.entry(key).or_insert(generator)))
    }

    pub fn hurst(&self) -> HurstIndex {
        self.hurst
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Two independent unit-step fGn sequences from one FFT, written into
    /// `first` and `second` (each of length `n`). `work` is scratch space of
    /// length `2n`, reused across calls.
    pub fn sample_pair_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        work: &mut Vec<Complex64>,
        first: &mut [f64],
        second: &mut [f64],
    ) {
        assert_eq!(first.len(), self.n);
        assert_eq!(second.len(), self.n);
        work.clear();
        work.extend(self.scales.iter().map(|&s| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        }));
        self.fft.process(work);
        for (k, z) in work[..self.n].iter().enumerate() {
            first[k] = z.re;
            second[k] = z.im;
        }
    }

    /// Convenience wrapper returning `(first, second)` scaled to `step`.
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R, step: f64) -> (Vec<f64>, Vec<f64>) {
        let mut work = Vec::with_capacity(2 * self.n);
        let mut a = vec![0.0; self.n];
        let mut b = vec![0.0; self.n];
        self.sample_pair_into(rng, &mut work, &mut a, &mut b);
        let scale = step.powf(self.hurst.value());
        a.iter_mut().chain(b.iter_mut()).for_each(|x| *x *= scale);
        (a, b)
    }
}

/// `n_steps` fGn increments of width `step`, deterministic in `seed`.
pub fn sample_fgn_spectral(
    hurst: HurstIndex,
    n_steps: usize,
    step: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::param("step", format!("must be positive, got {step}")));
    }
    let generator = FgnGenerator::shared(hurst, n_steps)?;
    let mut rng = rng::stream(seed, 0);
    Ok(generator.sample_pair(&mut rng, step).0)
}

/// Cumulative sum of `increments`, prefixed with 0.
pub fn fbm_path_from_fgn(increments: &[f64], grid: GridSpec, hurst: HurstIndex) -> Result<FbmPath> {
    grid.validate()?;
    if increments.len() != grid.n_steps {
        return Err(Error::LengthMismatch {
            expected: grid.n_steps,
            actual: increments.len(),
        });
    }
    let mut values = Vec::with_capacity(increments.len() + 1);
    values.push(0.0);
    cumulate_into(increments, &mut values);
    Ok(FbmPath {
        grid,
        hurst,
        values,
    })
}

/// Appends partial sums of `increments` to `out`, starting from its last value
/// (or 0 if empty).
pub(crate) fn cumulate_into(increments: &[f64], out: &mut Vec<f64>) {
    let mut acc = out.last().copied().unwrap_or(0.0);
    for &dx in increments {
        acc += dx;
        out.push(acc);
    }
}

/// Sample an fBm path on `grid` with the circulant sampler.
pub fn sample_fbm_spectral(hurst: HurstIndex, grid: GridSpec, seed: u64) -> Result<FbmPath> {
    grid.validate()?;
    let increments = sample_fgn_spectral(hurst, grid.n_steps, grid.step(), seed)?;
    fbm_path_from_fgn(&increments, grid, hurst)
}

pub const CHOLESKY_MAX_STEPS: usize = 2048;

/// Dense-covariance sampler of fBm on a grid; the lower factor is computed
/// once and reused.
#[derive(Debug, Clone)]
pub struct CholeskySampler {
    grid: GridSpec,
    hurst: HurstIndex,
    lower: DMatrix<f64>,
}

impl CholeskySampler {
    pub fn new(hurst: HurstIndex, grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        if grid.n_steps > CHOLESKY_MAX_STEPS {
            return Err(Error::GridTooLarge {
                requested: grid.n_steps,
                max: CHOLESKY_MAX_STEPS,
            });
        }
        let n = grid.n_steps;
        let two_h = 2.0 * hurst.value();
        let cov = DMatrix::from_fn(n, n, |i, j| {
            let t = grid.time(i + 1);
            let s = grid.time(j + 1);
            0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h))
        });
        let lower = cov
            .cholesky()
            .ok_or_else(|| Error::InvalidGrid("covariance not positive definite".into()))?
            .l();
        Ok(CholeskySampler { grid, hurst, lower })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FbmPath {
        let n = self.grid.n_steps;
        let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = &self.lower * z;
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        values.extend(x.iter().copied());
        FbmPath {
            grid: self.grid,
            hurst: self.hurst,
            values,
        }
    }
}

pub fn sample_fbm_cholesky(hurst: HurstIndex, grid: GridSpec, seed: u64) -> Result<FbmPath> {
    let sampler = CholeskySampler::new(hurst, grid)?;
    let mut rng = rng::stream(seed, 0);
    Ok(sampler.sample(&mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: f64) -> HurstIndex {
        HurstIndex::new(v).unwrap()
    }

    #[test]
    fn hurst_rejects_boundaries() {
        assert!(HurstIndex::new(0.0).is_err());
        assert!(HurstIndex::new(1.0).is_err());
        assert!(HurstIndex::new(f64::NAN).is_err());
        assert!(HurstIndex::new(0.3).is_ok());
        assert!(serde_json::from_str::<HurstIndex>("1.2").is_err());
    }

    #[test]
    fn covariance_examples() {
        assert_eq!(fgn_covariance(h(0.5), 0, 1.0), 1.0);
        assert_eq!(fgn_covariance(h(0.5), 3, 1.0), 0.0);
        let expected = 0.5 * (2f64.powf(1.5) - 2.0);
        assert!((fgn_covariance(h(0.75), 1, 1.0) - expected).abs() < 1e-15);
        assert!((expected - 0.41421).abs() < 1e-5);
        // step scaling
        assert!((fgn_covariance(h(0.75), 0, 4.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cumulative_sum() {
        let grid = GridSpec::new(3, 3.0).unwrap();
        let p = fbm_path_from_fgn(&[1.0, -1.0, 2.0], grid, h(0.5)).unwrap();
        assert_eq!(p.values, vec![0.0, 1.0, 0.0, 2.0]);
        let p = fbm_path_from_fgn(&[0.0; 3], grid, h(0.5)).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));
        assert!(matches!(
            fbm_path_from_fgn(&[1.0, 2.0], grid, h(0.5)),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(GridSpec::new(1, 1.0).is_err());
        assert!(GridSpec::new(4, 0.0).is_err());
    }

    #[test]
    fn spectral_is_deterministic() {
        let a = sample_fgn_spectral(h(0.3), 100, 0.1, 42).unwrap();
        let b = sample_fgn_spectral(h(0.3), 100, 0.1, 42).unwrap();
        let c = sample_fgn_spectral(h(0.3), 100, 0.1, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 100);
    }

    #[test]
    fn embedding_is_nonnegative_across_hurst() {
        for &hv in &[0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
            for &n in &[2, 3, 17, 256, 1000] {
                FgnGenerator::new(h(hv), n).unwrap();
            }
        }
    }

    #[test]
    fn cholesky_shape_and_guard() {
        let grid = GridSpec::new(2, 1.0).unwrap();
        let p = sample_fbm_cholesky(h(0.4), grid, 1).unwrap();
        assert_eq!(p.values.len(), 3);
        assert_eq!(p.values[0], 0.0);
        let big = GridSpec::new(CHOLESKY_MAX_STEPS + 1, 1.0).unwrap();
        assert!(matches!(
            CholeskySampler::new(h(0.4), big),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn index_at_or_before_handles_exact_multiples() {
        let grid = GridSpec::new(10, 1.0).unwrap();
        assert_eq!(grid.index_at_or_before(0.3), 3);
        assert_eq!(grid.index_at_or_before(0.35), 3);
        assert_eq!(grid.index_at_or_before(1.0), 10);
        assert_eq!(grid.index_at_or_before(7.0), 10);
        assert_eq!(grid.index_at_or_before(0.0), 0);
    }

    #[test]
    fn csv_dump_format() {
        let grid = GridSpec::new(2, 1.0).unwrap();
        let p = fbm_path_from_fgn(&[0.5, 0.25], grid, h(0.5)).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,value");
        assert_eq!(lines.len(), 4);
        let row: Vec<f64> = lines[3].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row, vec![1.0, 0.75]);
    }
}
