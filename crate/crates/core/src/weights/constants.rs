//! Supremum scans for `A_p`, Fujii-Wilson `A_∞`, two-weight `A^α_{p,q}` and
//! Morrey functionals.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::WeightSpec;
use crate::error::{Error, Result};
use crate::grid::{all_shifts, level_sign, CubeScan, DyadicCube, MAX_DIM};

/// A doubled scan raising the value by more than this factor is divergent.
pub const DEFAULT_GROWTH_THRESHOLD: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Relative tolerance of every cube integral.
    pub tol: f64,
    pub growth_threshold: f64,
    /// Skip the doubled rerun (the report then has `growth_factor = 1`).
    pub check_divergence: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { tol: super::DEFAULT_TOL, growth_threshold: DEFAULT_GROWTH_THRESHOLD, check_divergence: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantReport {
    pub value: f64,
    /// `None` only when every cube was vacuous.
    pub argmax_cube: Option<DyadicCube>,
    pub scan: CubeScan,
    pub divergent: bool,
    pub growth_factor: f64,
    /// Value on the doubled scan (equal to `value` when not computed).
    pub doubled_value: f64,
}

type CubeFunctional<'a> = dyn Fn(&DyadicCube) -> Result<Option<f64>> + Sync + 'a;

/// Maximum over the scan; ties keep the first cube in scan order.
fn sup_over(scan: &CubeScan, f: &CubeFunctional<'_>) -> Result<(f64, Option<DyadicCube>)> {
    let cubes = scan.enumerate()?;
    let values: Vec<Option<f64>> = cubes.par_iter().map(f).collect::<Result<_>>()?;
    let mut best = (f64::NEG_INFINITY, None);
    for (q, v) in cubes.iter().zip(values) {
        if let Some(v) = v {
            if v.is_nan() {
                return Err(Error::InvalidParameter(format!("NaN functional on cube {q:?}")));
            }
            if v > best.0 {
                best = (v, Some(*q));
            }
        }
    }
    if best.1.is_none() {
        best.0 = 0.0;
    }
    Ok(best)
}

fn run_report(scan: &CubeScan, opts: &ScanOptions, f: &CubeFunctional<'_>) -> Result<ConstantReport> {
    let (value, argmax_cube) = sup_over(scan, f)?;
    let (divergent, growth_factor, doubled_value) = if !value.is_finite() {
        (true, f64::INFINITY, value)
    } else if opts.check_divergence {
        let (doubled, _) = sup_over(&scan.doubled(), f)?;
        let growth = if value > 0.0 {
            doubled / value
        } else if doubled > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        (growth > opts.growth_threshold || !doubled.is_finite(), growth, doubled)
    } else {
        (false, 1.0, value)
    };
    Ok(ConstantReport { value, argmax_cube, scan: scan.clone(), divergent, growth_factor, doubled_value })
}

fn check_dims(w: &WeightSpec, scan: &CubeScan) -> Result<()> {
    if w.dim() != scan.dim() {
        return Err(Error::InvalidParameter("weight and scan dimensions differ".into()));
    }
    Ok(())
}

/// Integral that reports a non-integrable singularity as `+∞`.
fn integral_or_inf(w: &WeightSpec, q: &DyadicCube, tol: f64) -> Result<f64> {
    match w.cube_integral(q, tol) {
        Err(Error::NotLocallyIntegrable(_)) => Ok(f64::INFINITY),
        other => other,
    }
}

/// `[w]_{A_p}` over the scan; `p = f64::INFINITY` selects the exp-log form.
///
/// A dual weight `w^{1-p'}` that fails to be locally integrable on some cube
/// makes that cube's functional `+∞` (reported as divergent).
pub fn ap_constant(w: &WeightSpec, p: f64, scan: &CubeScan, opts: &ScanOptions) -> Result<ConstantReport> {
    check_dims(w, scan)?;
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let tol = opts.tol;
    let dim = w.dim();
    if p == 1.0 {
        let f = |q: &DyadicCube| -> Result<Option<f64>> {
            let avg = w.cube_integral(q, tol)? / q.measure();
            if avg == 0.0 {
                return Ok(None);
            }
            let (lo, hi) = q.bounds();
            let inf = w.box_ess_inf(&lo[..dim], &hi[..dim]);
            Ok(Some(if inf > 0.0 { avg / inf } else { f64::INFINITY }))
        };
        return run_report(scan, opts, &f);
    }
    if p.is_infinite() {
        let f = |q: &DyadicCube| -> Result<Option<f64>> {
            let avg = w.cube_integral(q, tol)? / q.measure();
            if avg == 0.0 {
                return Ok(None);
            }
            let (lo, hi) = q.bounds();
            let log_avg = w.box_log_integral(&lo[..dim], &hi[..dim], tol)? / q.measure();
            Ok(Some(avg * (-log_avg).exp()))
        };
        return run_report(scan, opts, &f);
    }
    let pp = p / (p - 1.0);
    let dual = w.pow(1.0 - pp);
    let f = |q: &DyadicCube| -> Result<Option<f64>> {
        let avg = w.cube_integral(q, tol)? / q.measure();
        if avg == 0.0 {
            return Ok(None);
        }
        let dual_avg = integral_or_inf(&dual, q, tol)? / q.measure();
        Ok(Some(avg * dual_avg.powf(p - 1.0)))
    };
    run_report(scan, opts, &f)
}

/// Resolution of the maximal-function surrogate inside each scanned cube.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerScan {
    /// Sample points and the finest inner cubes sit `depth` levels below `Q`.
    pub depth: u32,
    /// Shifts of the inner cubes.
    pub shifts: Vec<[u8; MAX_DIM]>,
}

impl InnerScan {
    pub fn all_shifts(dim: usize, depth: u32) -> Self {
        Self { depth, shifts: all_shifts(dim) }
    }
}

/// Fujii-Wilson `|w|_{A_∞}` with `M(χ_Q w)` replaced by the maximum of
/// `w(Q ∩ Q')/|Q'|` over inner cubes `Q'` of levels `j..=j+depth`.
pub fn fujii_wilson(w: &WeightSpec, scan: &CubeScan, inner: &InnerScan, opts: &ScanOptions) -> Result<ConstantReport> {
    check_dims(w, scan)?;
    if inner.shifts.is_empty() {
        return Err(Error::EmptyScan);
    }
    let dim = w.dim();
    let tol = opts.tol;
    let per_axis = 1usize << inner.depth;
    let points = per_axis.pow(dim as u32);
    let f = |q: &DyadicCube| -> Result<Option<f64>> {
        let wq = w.cube_integral(q, tol)?;
        if wq <= 0.0 {
            return Ok(None);
        }
        let (qlo, qhi) = q.bounds();
        let delta = q.side() / per_axis as f64;
        let mut max_fn = vec![0.0f64; points];
        for level in q.level..=q.level + inner.depth as i32 {
            let side = (-level as f64).exp2();
            let sign = level_sign(level);
            for shift in &inner.shifts {
                // Index ranges of inner cubes meeting Q with positive measure.
                let mut ranges = [(0i64, -1i64); MAX_DIM];
                for k in 0..dim {
                    let off = (sign * shift[k] as i64) as f64 / 3.0;
                    let lo = (qlo[k] / side - off - 1.0).floor() as i64 + 1;
                    let hi = (qhi[k] / side - off).ceil() as i64 - 1;
                    ranges[k] = (lo, hi);
                }
                let counts: Vec<usize> = (0..dim).map(|k| (ranges[k].1 - ranges[k].0 + 1).max(0) as usize).collect();
                let total: usize = counts.iter().product();
                for code in 0..total {
                    let mut c = code;
                    let mut index = [0i64; MAX_DIM];
                    for k in (0..dim).rev() {
                        index[k] = ranges[k].0 + (c % counts[k]) as i64;
                        c /= counts[k];
                    }
                    let cube = DyadicCube { dim, shift: *shift, level, index };
                    let (clo, chi) = cube.bounds();
                    let mut ilo = [0.0; MAX_DIM];
                    let mut ihi = [0.0; MAX_DIM];
                    let mut pr = [(0usize, 0usize); MAX_DIM];
                    let mut empty = false;
                    for k in 0..dim {
                        ilo[k] = clo[k].max(qlo[k]);
                        ihi[k] = chi[k].min(qhi[k]);
                        // Sample points x_i = qlo + (i + 1/2) δ inside [clo, chi).
                        let first = ((clo[k] - qlo[k]) / delta - 0.5).ceil().max(0.0) as usize;
                        let last_f = ((chi[k] - qlo[k]) / delta - 0.5).ceil() - 1.0;
                        if ihi[k] <= ilo[k] || last_f < first as f64 || first >= per_axis {
                            empty = true;
                            break;
                        }
                        pr[k] = (first, (last_f as usize).min(per_axis - 1));
                    }
                    if empty {
                        continue;
                    }
                    let avg = w.box_integral(&ilo[..dim], &ihi[..dim], tol)? / cube.measure();
                    let sub: Vec<usize> = (0..dim).map(|k| pr[k].1 - pr[k].0 + 1).collect();
                    let sub_total: usize = sub.iter().product();
                    for s in 0..sub_total {
                        let mut c = s;
                        let mut flat = 0usize;
                        let mut idx = [0usize; MAX_DIM];
                        for k in (0..dim).rev() {
                            idx[k] = pr[k].0 + c % sub[k];
                            c /= sub[k];
                        }
                        for &i in &idx[..dim] {
                            flat = flat * per_axis + i;
                        }
                        if avg > max_fn[flat] {
                            max_fn[flat] = avg;
                        }
                    }
                }
            }
        }
        let integral = max_fn.iter().sum::<f64>() * q.measure() / points as f64;
        Ok(Some(integral / wq))
    };
    run_report(scan, opts, &f)
}

/// `[σ, w]_{A^α_{p,q}} = sup_Q |Q|^{α/n - (1/p - 1/q)} ⟨σ⟩_Q^{1/p'} ⟨w⟩_Q^{1/q}`.
pub fn two_weight_constant(
    sigma: &WeightSpec,
    w: &WeightSpec,
    p: f64,
    q: f64,
    alpha: f64,
    scan: &CubeScan,
    opts: &ScanOptions,
) -> Result<ConstantReport> {
    check_dims(sigma, scan)?;
    check_dims(w, scan)?;
    if !(p >= 1.0 && p.is_finite() && q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 1 <= p, q < inf, got p={p}, q={q}")));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be finite".into()));
    }
    let n = sigma.dim() as f64;
    let expo = alpha / n - (1.0 / p - 1.0 / q);
    let inv_pp = 1.0 - 1.0 / p;
    let tol = opts.tol;
    let f = |cube: &DyadicCube| -> Result<Option<f64>> {
        let m = cube.measure();
        let s = if inv_pp == 0.0 { 1.0 } else { integral_or_inf(sigma, cube, tol)? / m };
        let v = integral_or_inf(w, cube, tol)? / m;
        if s == 0.0 || v == 0.0 {
            return Ok(Some(0.0));
        }
        Ok(Some(m.powf(expo) * s.powf(inv_pp) * v.powf(1.0 / q)))
    };
    run_report(scan, opts, &f)
}

/// `‖f‖_{M^p_q} = sup_Q |Q|^{1/p - 1/q} ‖f‖_{L^q(Q)}`; `p` may be infinite.
///
/// For `p < q` the space is trivial and the scan reports divergence for any
/// nonzero `f`.
pub fn morrey_norm(f: &WeightSpec, p: f64, q: f64, scan: &CubeScan, opts: &ScanOptions) -> Result<ConstantReport> {
    check_dims(f, scan)?;
    if !(q >= 1.0 && q.is_finite()) || !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("need p > 0 and 1 <= q < inf, got p={p}, q={q}")));
    }
    let fq = f.pow(q);
    let expo = 1.0 / p - 1.0 / q;
    let tol = opts.tol;
    let g = |cube: &DyadicCube| -> Result<Option<f64>> {
        let integral = integral_or_inf(&fq, cube, tol)?;
        if integral == 0.0 {
            return Ok(Some(0.0));
        }
        Ok(Some(cube.measure().powf(expo) * integral.powf(1.0 / q)))
    };
    run_report(scan, opts, &g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TheoremMode {
    /// `W = [σ^{-τ/(p-τ)} V^{p/(p-τ)}, σ]_{A^β_{p/τ,p}}`.
    Local { p: f64, tau: f64, beta: f64 },
    /// `W1, W2, W3` with `β = 2 - (α + n/q)(τ - 1)` and
    /// `β1 = α + β + n(1/q - 1/q1)`.
    Global { p: f64, q: f64, q1: f64, tau: f64, alpha: f64 },
}

/// Exponents derived for the global constants.
pub fn global_exponents(n: f64, p: f64, q: f64, q1: f64, tau: f64, alpha: f64) -> BTreeMap<&'static str, f64> {
    let beta = 2.0 - (alpha + n / q) * (tau - 1.0);
    let mut out = BTreeMap::new();
    out.insert("beta", beta);
    out.insert("ell", alpha - n * (1.0 / p - 1.0 / q));
    out.insert("ell1", 2.0 - (alpha + n / q) * (tau - 2.0) - n / p);
    out.insert("beta1", alpha + beta + n * (1.0 / q - 1.0 / q1));
    out
}

/// `W` (local) or `W1`, `W2`, `W3` (global).
pub fn theorem_constants(
    sigma: &WeightSpec,
    v: &WeightSpec,
    mode: TheoremMode,
    scan: &CubeScan,
    opts: &ScanOptions,
) -> Result<BTreeMap<String, ConstantReport>> {
    check_dims(sigma, scan)?;
    check_dims(v, scan)?;
    let n = sigma.dim() as f64;
    let mut out = BTreeMap::new();
    match mode {
        TheoremMode::Local { p, tau, beta } => {
            if !(p > 1.0 && tau >= 1.0) {
                return Err(Error::ExponentOutOfRange(format!("need p > 1 and tau >= 1, got p={p}, tau={tau}")));
            }
            if tau >= p {
                return Err(Error::ExponentOutOfRange(format!("r = p/tau = {} <= 1", p / tau)));
            }
            let left = sigma.pow(-tau / (p - tau)).mul(&v.pow(p / (p - tau)))?;
            out.insert("W".to_string(), two_weight_constant(&left, sigma, p / tau, p, beta, scan, opts)?);
        }
        TheoremMode::Global { p, q, q1, tau, alpha } => {
            if !(p > 1.0 && q >= 1.0 && q1 >= 1.0) {
                return Err(Error::ExponentOutOfRange(format!("need p > 1 and q, q1 >= 1, got p={p}, q={q}, q1={q1}")));
            }
            let ex = global_exponents(n, p, q, q1, tau, alpha);
            let pp = p / (p - 1.0);
            let dual = sigma.pow(1.0 - pp);
            let left = dual.mul(&v.pow(pp))?;
            let one = WeightSpec::one(sigma.dim())?;
            out.insert("W1".to_string(), two_weight_constant(&left, sigma, p, p, ex["beta"], scan, opts)?);
            out.insert("W2".to_string(), two_weight_constant(&dual, &one, p, q, alpha, scan, opts)?);
            out.insert("W3".to_string(), two_weight_constant(&left, &one, p, q1, ex["beta1"], scan, opts)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SampleBox;
    use approx::assert_relative_eq;

    fn scan_1d(lmin: i32, lmax: i32, l: f64) -> CubeScan {
        CubeScan::all_shifts(lmin, lmax, SampleBox::new(1, l, 8).unwrap()).unwrap()
    }

    #[test]
    fn constant_weight_has_unit_ap() {
        let w = WeightSpec::one(2).unwrap();
        let scan = CubeScan::all_shifts(-1, 2, SampleBox::new(2, 2.0, 8).unwrap()).unwrap();
        let r = ap_constant(&w, 2.0, &scan, &ScanOptions::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
        assert!(!r.divergent);
    }

    #[test]
    fn quadratic_weight_is_not_a2_in_1d() {
        let w = WeightSpec::power_hom(1, 2.0).unwrap();
        let r = ap_constant(&w, 2.0, &scan_1d(-2, 4, 4.0), &ScanOptions::default()).unwrap();
        assert!(r.divergent);
    }

    #[test]
    fn unit_two_weight_at_critical_exponent() {
        let one = WeightSpec::one(2).unwrap();
        let (p, q) = (2.0, 4.0);
        let alpha = 2.0 * (1.0 / p - 1.0 / q);
        let scan = CubeScan::all_shifts(-2, 3, SampleBox::new(2, 2.0, 8).unwrap()).unwrap();
        let r = two_weight_constant(&one, &one, p, q, alpha, &scan, &ScanOptions::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
        assert!(!r.divergent);
    }

    #[test]
    fn small_alpha_blows_up_on_small_cubes() {
        let one = WeightSpec::one(1).unwrap();
        let r = two_weight_constant(&one, &one, 2.0, 4.0, 0.0, &scan_1d(0, 6, 2.0), &ScanOptions::default()).unwrap();
        assert!(r.divergent);
    }

    #[test]
    fn local_mode_rejects_tau_at_least_p() {
        let one = WeightSpec::one(1).unwrap();
        let err = theorem_constants(
            &one,
            &one,
            TheoremMode::Local { p: 2.0, tau: 2.0, beta: 0.5 },
            &scan_1d(0, 1, 1.0),
            &ScanOptions::default(),
        );
        assert!(matches!(err, Err(Error::ExponentOutOfRange(_))));
    }

    #[test]
    fn zero_potential_gives_zero_w() {
        let one = WeightSpec::one(1).unwrap();
        let zero = WeightSpec::constant(1, 0.0).unwrap();
        let m = theorem_constants(
            &one,
            &zero,
            TheoremMode::Local { p: 3.0, tau: 2.0, beta: 0.5 },
            &scan_1d(-1, 2, 2.0),
            &ScanOptions::default(),
        )
        .unwrap();
        assert_eq!(m["W"].value, 0.0);
        assert!(!m["W"].divergent);
    }

    #[test]
    fn fujii_wilson_of_constant_is_one() {
        let w = WeightSpec::one(1).unwrap();
        let inner = InnerScan::all_shifts(1, 4);
        let r = fujii_wilson(&w, &scan_1d(-1, 2, 2.0), &inner, &ScanOptions::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    }
}
