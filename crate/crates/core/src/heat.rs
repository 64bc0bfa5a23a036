//! Heat semigroup `e^{tΔ}` on sampled fields, weighted Lebesgue norms and
//! smoothing-constant scans over a time grid.
//!
//! The kernel is separable: along each axis offset `d` carries the Gaussian
//! sampled at `dh`, normalised to unit mass over the truncation window, so
//! the discrete weights are non-negative and conserve mass. Values outside
//! the box are zero.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CubeScan, SampleBox, SampledField};
use crate::weights::{morrey_norm, two_weight_constant, ConstantReport, ScanOptions, WeightSpec};

/// Time grid and truncation tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatConfig {
    pub tail_tol: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
}

impl Default for HeatConfig {
    fn default() -> Self {
        Self { tail_tol: 1e-10, t_min: 1e-2, t_max: 1e1, t_count: 13 }
    }
}

impl HeatConfig {
    pub fn new(tail_tol: f64, t_min: f64, t_max: f64, t_count: usize) -> Result<Self> {
        let cfg = Self { tail_tol, t_min, t_max, t_count };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0 && self.tail_tol <= 1e-4) {
            return Err(Error::InvalidParameter(format!("tail_tol must lie in (0, 1e-4], got {}", self.tail_tol)));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < t_min < t_max, got {} and {}",
                self.t_min, self.t_max
            )));
        }
        if self.t_count < 2 {
            return Err(Error::InvalidParameter("t_count must be at least 2".into()));
        }
        Ok(())
    }

    /// Log-spaced times from `t_min` to `t_max` inclusive.
    pub fn times(&self) -> Vec<f64> {
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let m = (self.t_count - 1) as f64;
        (0..self.t_count)
            .map(|i| match i {
                0 => self.t_min,
                _ if i + 1 == self.t_count => self.t_max,
                _ => (a + (b - a) * i as f64 / m).exp(),
            })
            .collect()
    }
}

/// Truncated one-dimensional cell kernel for a fixed grid and time.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernel {
    grid: SampleBox,
    t: f64,
    /// Weights for offsets `0..=radius`.
    weights: Vec<f64>,
}

impl HeatKernel {
    pub fn new(grid: &SampleBox, t: f64, tail_tol: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("need t > 0, got {t}")));
        }
        let h = grid.cell_width();
        let s = (4.0 * t).sqrt();
        // Smallest radius whose two-sided tail per axis is below tail_tol.
        let mut radius = 0usize;
        while libm::erfc((radius as f64 + 0.5) * h / s) >= tail_tol {
            radius += 1;
        }
        let reach = radius as f64 * h;
        if reach > grid.halfwidth() {
            return Err(Error::TimeTooLarge { radius: reach, min_halfwidth: reach });
        }
        // Point samples of G_t, normalised so the truncated kernel has unit
        // mass. Composing two kernels then reproduces the kernel of the summed
        // time up to aliasing, which is negligible once t >> h^2.
        let raw: Vec<f64> = (0..=radius).map(|d| (-((d as f64 * h) / s).powi(2)).exp()).collect();
        let total = raw[0] + 2.0 * raw[1..].iter().sum::<f64>();
        let weights = raw.into_iter().map(|v| v / total).collect();
        Ok(Self { grid: *grid, t, weights })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn radius(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        if f.grid() != &self.grid {
            return Err(Error::InvalidParameter("kernel built for a different grid".into()));
        }
        let mut values = f.values().to_vec();
        for axis in 0..self.grid.dim() {
            values = self.pass(&values, axis);
        }
        f.with_values(values)
    }

    fn pass(&self, input: &[f64], axis: usize) -> Vec<f64> {
        let n = self.grid.cells_per_axis();
        let stride = self.grid.stride(axis);
        let r = self.radius().min(n - 1);
        let w = &self.weights;
        let block = n * stride;
        let mut out = vec![0.0; input.len()];
        // Each block holds whole lines along `axis`; within a block, row `i`
        // is the contiguous run of `stride` values with axis index `i`.
        out.par_chunks_mut(block).zip(input.par_chunks(block)).for_each(|(o, x)| {
            if stride == 1 {
                for i in 0..n {
                    let lo = i.saturating_sub(r);
                    let hi = (i + r).min(n - 1);
                    o[i] = (lo..=hi).map(|j| w[i.abs_diff(j)] * x[j]).sum();
                }
                return;
            }
            for (oi, xi) in o.iter_mut().zip(x.iter()) {
                *oi = w[0] * xi;
            }
            for d in 1..=r {
                let wd = w[d];
                for i in d..n {
                    let (a, b) = (i * stride, (i - d) * stride);
                    for k in 0..stride {
                        o[a + k] += wd * x[b + k];
                        o[b + k] += wd * x[a + k];
                    }
                }
            }
        });
        out
    }
}

/// `e^{tΔ} f` with zero extension outside the box.
pub fn heat_apply(f: &SampledField, t: f64, cfg: &HeatConfig) -> Result<SampledField> {
    HeatKernel::new(f.grid(), t, cfg.tail_tol)?.apply(f)
}

/// Per-cell integrals of a weight, reused across norm evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct CellWeights {
    grid: SampleBox,
    values: Vec<f64>,
}

impl CellWeights {
    pub fn new(grid: &SampleBox, w: &WeightSpec, tol: f64) -> Result<Self> {
        if w.dim() != grid.dim() {
            return Err(Error::InvalidParameter("weight and grid dimensions differ".into()));
        }
        let values = w.grid_integrals(grid, tol)?;
        Ok(Self { grid: *grid, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `‖f‖_{L^p(w)}`; for `p = ∞` the max of `|f|` over cells with `w > 0`.
    pub fn norm(&self, f: &SampledField, p: f64) -> Result<f64> {
        if f.grid() != &self.grid {
            return Err(Error::InvalidParameter("field and weights on different grids".into()));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("need p >= 1, got {p}")));
        }
        self.norm_values(f.values(), p)
    }

    /// [`CellWeights::norm`] on raw cell values in the same flat order.
    pub fn norm_values(&self, f: &[f64], p: f64) -> Result<f64> {
        if f.len() != self.values.len() {
            return Err(Error::InvalidParameter("value count does not match the grid".into()));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("need p >= 1, got {p}")));
        }
        let pairs = f.iter().zip(&self.values);
        if p.is_infinite() {
            return Ok(pairs.filter(|(_, w)| **w > 0.0).map(|(v, _)| v.abs()).fold(0.0, f64::max));
        }
        let s: f64 = pairs.map(|(v, w)| v.abs().powf(p) * w).sum();
        Ok(s.powf(1.0 / p))
    }
}

/// `‖f‖_{L^p(w)}` from per-cell weight integrals.
pub fn weighted_norm(f: &SampledField, p: f64, w: &WeightSpec) -> Result<f64> {
    CellWeights::new(f.grid(), w, crate::weights::DEFAULT_TOL)?.norm(f, p)
}

/// Result of a smoothing scan over the time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingReport {
    pub sup_ratio: f64,
    pub bound: ConstantReport,
    /// `(t, ratio at t)`.
    pub per_time: Vec<(f64, f64)>,
}

impl SmoothingReport {
    /// `sup_ratio / bound`, the empirical constant.
    pub fn c_emp(&self) -> f64 {
        self.sup_ratio / self.bound.value
    }
}

fn check_exponents(n: f64, p: f64, q: f64, gamma: f64) -> Result<()> {
    if !(p > 1.0) {
        return Err(Error::ExponentOutOfRange(format!("need p > 1, got {p}")));
    }
    if !(p <= q && q.is_finite()) {
        return Err(Error::ExponentOutOfRange(format!("need p <= q < inf, got p={p}, q={q}")));
    }
    let low = n * (1.0 / p - 1.0 / q);
    if !(gamma >= low - 1e-12) {
        return Err(Error::ExponentOutOfRange(format!("need gamma >= n(1/p-1/q) = {low}, got {gamma}")));
    }
    if !(gamma < n) {
        return Err(Error::ExponentOutOfRange(format!("need gamma < n, got {gamma}")));
    }
    Ok(())
}

fn input_norm(f: &SampledField, p: f64, sigma: &WeightSpec) -> Result<f64> {
    let norm = weighted_norm(f, p, sigma)?;
    if !(norm > 0.0) {
        return Err(Error::ZeroInputNorm);
    }
    Ok(norm)
}

/// `sup_t t^{γ/2} ‖e^{tΔ}f‖_{L^q(w)} / ‖f‖_{L^p(σ)}` against
/// `[σ^{1-p'}, w]_{A^γ_{p,q}}`.
#[allow(clippy::too_many_arguments)]
pub fn smoothing_constant_scan(
    f: &SampledField,
    sigma: &WeightSpec,
    w: &WeightSpec,
    p: f64,
    q: f64,
    gamma: f64,
    cfg: &HeatConfig,
    scan: &CubeScan,
    opts: &ScanOptions,
) -> Result<SmoothingReport> {
    cfg.validate()?;
    let n = f.grid().dim() as f64;
    check_exponents(n, p, q, gamma)?;
    let denom = input_norm(f, p, sigma)?;
    let cw = CellWeights::new(f.grid(), w, opts.tol)?;
    let per_time = cfg
        .times()
        .into_par_iter()
        .map(|t| {
            let u = heat_apply(f, t, cfg)?;
            Ok((t, t.powf(0.5 * gamma) * cw.norm(&u, q)? / denom))
        })
        .collect::<Result<Vec<_>>>()?;
    let pp = p / (p - 1.0);
    let bound = two_weight_constant(&sigma.pow(1.0 - pp), w, p, q, gamma, scan, opts)?;
    let sup_ratio = per_time.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(SmoothingReport { sup_ratio, bound, per_time })
}

/// `sup_t t^{(γ+n/q)/2} ‖e^{tΔ}f‖_∞ / ‖f‖_{L^p(σ)}` against
/// `‖σ^{-1/p}‖_{M^{n/ℓ}_{p'}}` with `ℓ = γ - n(1/p - 1/q)`.
#[allow(clippy::too_many_arguments)]
pub fn smoothing_sup_scan(
    f: &SampledField,
    sigma: &WeightSpec,
    p: f64,
    q: f64,
    gamma: f64,
    cfg: &HeatConfig,
    scan: &CubeScan,
    opts: &ScanOptions,
) -> Result<SmoothingReport> {
    cfg.validate()?;
    let n = f.grid().dim() as f64;
    check_exponents(n, p, q, gamma)?;
    let ell = (gamma - n * (1.0 / p - 1.0 / q)).max(0.0);
    let denom = input_norm(f, p, sigma)?;
    let per_time = cfg
        .times()
        .into_par_iter()
        .map(|t| {
            let u = heat_apply(f, t, cfg)?;
            Ok((t, t.powf(0.5 * (gamma + n / q)) * u.max_abs() / denom))
        })
        .collect::<Result<Vec<_>>>()?;
    let pp = p / (p - 1.0);
    let morrey_p = if ell == 0.0 { f64::INFINITY } else { n / ell };
    let bound = morrey_norm(&sigma.pow(-1.0 / p), morrey_p, pp, scan, opts)?;
    let sup_ratio = per_time.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(SmoothingReport { sup_ratio, bound, per_time })
}
