//! Dyadic maximal functions, stopping-time sparse families on shifted
//! grids, fractional sparse operators and the fractional integral.
//!
//! Cube averages are taken from per-level tables of `∫|f|`: the finest scan
//! level comes from the field's cumulative table and every coarser level is
//! the exact floating-point sum of its children. That makes the parent bound
//! `⟨f⟩_Q ≤ 2^n ⟨f⟩_{parent}` hold bit-for-bit, so the stopping-cube sandwich
//! can be asserted without slack.
//!
//! Point membership (cells, witnesses) is decided at cell centres.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CubeScan, DyadicCube, SampleBox, SampledField, MAX_DIM};
use crate::heat::HeatKernel;
use crate::quadrature::{Adaptive, GaussLegendre};

/// Relative floor below which a sparse sum counts as vanishing.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// `λ = 2^{n+1}`.
pub fn default_lambda(dim: usize) -> f64 {
    (dim as f64 + 1.0).exp2()
}

/// Integrals of `|f|` over every scan cube of one shift, level by level.
#[derive(Debug, Clone)]
pub struct LevelTable {
    dim: usize,
    shift: [u8; MAX_DIM],
    level_min: i32,
    levels: Vec<BTreeMap<[i64; MAX_DIM], f64>>,
}

impl LevelTable {
    /// `f` must be non-negative.
    pub fn new(f: &SampledField, shift: &[u8; MAX_DIM], scan: &CubeScan) -> Result<Self> {
        scan.validate()?;
        let dim = f.grid().dim();
        if dim != scan.dim() {
            return Err(Error::InvalidParameter("field and scan dimensions differ".into()));
        }
        let depth = (scan.level_max - scan.level_min + 1) as usize;
        let mut levels = vec![BTreeMap::new(); depth];
        let finest: BTreeMap<_, _> = scan
            .level_cubes(shift, scan.level_max)
            .into_par_iter()
            .map(|q| (q.index, f.cube_integral(&q).max(0.0)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        levels[depth - 1] = finest;
        for d in (0..depth - 1).rev() {
            let level = scan.level_min + d as i32 + 1;
            let mut coarse = BTreeMap::new();
            for (idx, v) in &levels[d + 1] {
                let q = DyadicCube { dim, shift: *shift, level, index: *idx };
                *coarse.entry(q.parent().index).or_insert(0.0) += *v;
            }
            levels[d] = coarse;
        }
        Ok(Self { dim, shift: *shift, level_min: scan.level_min, levels })
    }

    pub fn level_min(&self) -> i32 {
        self.level_min
    }

    pub fn level_max(&self) -> i32 {
        self.level_min + self.levels.len() as i32 - 1
    }

    pub fn shift(&self) -> [u8; MAX_DIM] {
        self.shift
    }

    fn scale(&self, level: i32) -> f64 {
        (level as f64 * self.dim as f64).exp2()
    }

    /// Average over the given cube, zero if it is not in the table.
    pub fn average(&self, q: &DyadicCube) -> f64 {
        let d = (q.level - self.level_min) as usize;
        self.levels.get(d).and_then(|m| m.get(&q.index)).map_or(0.0, |v| v * self.scale(q.level))
    }

    /// Cube of `level` containing `x` and its average.
    pub fn locate(&self, level: i32, x: &[f64]) -> (DyadicCube, f64) {
        let q = DyadicCube::locate(self.dim, &self.shift, level, x);
        let a = self.average(&q);
        (q, a)
    }

    /// All `(cube, average)` pairs of one level, index-ordered.
    pub fn level_entries(&self, level: i32) -> impl Iterator<Item = (DyadicCube, f64)> + '_ {
        let d = (level - self.level_min) as usize;
        let scale = self.scale(level);
        self.levels[d]
            .iter()
            .map(move |(idx, v)| (DyadicCube { dim: self.dim, shift: self.shift, level, index: *idx }, v * scale))
    }
}

fn abs_field(f: &SampledField) -> SampledField {
    f.map(f64::abs).expect("absolute values stay finite")
}

fn check_nonnegative(f: &SampledField) -> Result<()> {
    if f.values().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter("field must be non-negative".into()));
    }
    Ok(())
}

/// `M_{D^a} f`: pointwise max of `⟨|f|⟩_Q` over scan cubes of shift `a`
/// (the scan's own shift list is ignored).
pub fn dyadic_maximal(f: &SampledField, shift: &[u8; MAX_DIM], scan: &CubeScan) -> Result<SampledField> {
    let table = LevelTable::new(&abs_field(f), shift, scan)?;
    let grid = *f.grid();
    let values = (0..grid.cell_count())
        .into_par_iter()
        .map(|i| {
            let x = grid.cell_center(i);
            (table.level_min()..=table.level_max()).map(|j| table.locate(j, &x).1).fold(0.0, f64::max)
        })
        .collect();
    f.with_values(values)
}

/// `M^α f`: pointwise max of `|Q|^{α/n} ⟨|f|⟩_Q` over every scan cube.
pub fn fractional_maximal(f: &SampledField, alpha: f64, scan: &CubeScan) -> Result<SampledField> {
    let n = f.grid().dim() as f64;
    if !(0.0..n).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("need 0 <= alpha < n, got {alpha}")));
    }
    let fa = abs_field(f);
    let tables = scan.shifts.iter().map(|s| LevelTable::new(&fa, s, scan)).collect::<Result<Vec<_>>>()?;
    let grid = *f.grid();
    let values = (0..grid.cell_count())
        .into_par_iter()
        .map(|i| {
            let x = grid.cell_center(i);
            let mut best: f64 = 0.0;
            for t in &tables {
                for j in t.level_min()..=t.level_max() {
                    best = best.max((-(j as f64) * alpha).exp2() * t.locate(j, &x).1);
                }
            }
            best
        })
        .collect();
    f.with_values(values)
}

/// One stopping cube with its generation index `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingCube {
    pub cube: DyadicCube,
    pub generation: i32,
    pub average: f64,
}

/// Stopping cubes of one shift together with their sparseness witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFamily {
    pub shift: [u8; MAX_DIM],
    pub lambda: f64,
    pub cubes: Vec<StoppingCube>,
    /// Cell indices of `E_Q`, parallel to `cubes`.
    pub witnesses: Vec<Vec<usize>>,
    pub eta_achieved: f64,
    pub grid: SampleBox,
}

impl SparseFamily {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// `|E_Q|` for cube `i`.
    pub fn witness_measure(&self, i: usize) -> f64 {
        self.witnesses[i].len() as f64 * self.grid.cell_volume()
    }
}

/// Smallest `k` with `λ^k >= v` (`v > 0`).
fn ceil_power(lambda: f64, v: f64) -> i32 {
    let mut k = (v.ln() / lambda.ln()).ceil() as i32;
    while lambda.powi(k - 1) >= v {
        k -= 1;
    }
    while lambda.powi(k) < v {
        k += 1;
    }
    k
}

/// Stopping-time family of shift `a`: a cube is a generation-`k` cube when
/// every scan ancestor has average `<= λ^k` and its own average is `> λ^k`.
/// Generations start at the smallest `k` with `λ^k` above every average at
/// the coarsest scan level.
pub fn build_sparse(f: &SampledField, shift: &[u8; MAX_DIM], lambda: f64, scan: &CubeScan) -> Result<SparseFamily> {
    let grid = *f.grid();
    let dim = grid.dim();
    let min = (dim as f64).exp2();
    if !(lambda > min) || !lambda.is_finite() {
        return Err(Error::LambdaTooSmall { lambda, min });
    }
    check_nonnegative(f)?;
    let empty =
        |eta| SparseFamily { shift: *shift, lambda, cubes: Vec::new(), witnesses: Vec::new(), eta_achieved: eta, grid };
    if f.max() == 0.0 {
        return Ok(empty(1.0));
    }
    let table = LevelTable::new(f, shift, scan)?;
    let (lmin, lmax) = (table.level_min(), table.level_max());

    let top_max = table.level_entries(lmin).map(|(_, a)| a).fold(0.0, f64::max);
    let max_avg =
        (lmin..=lmax).flat_map(|j| table.level_entries(j).map(|(_, a)| a).collect::<Vec<_>>()).fold(0.0, f64::max);
    if top_max <= 0.0 {
        return Err(Error::NoDecay { top_max, max_avg });
    }
    let k_min = ceil_power(lambda, top_max);
    if max_avg <= lambda.powi(k_min) {
        return Err(Error::NoDecay { top_max, max_avg });
    }

    // Running max of ancestor averages, level by level.
    let mut cubes = Vec::new();
    let mut prev: BTreeMap<[i64; MAX_DIM], (f64, f64)> = BTreeMap::new();
    for j in lmin..=lmax {
        let mut cur = BTreeMap::new();
        for (q, avg) in table.level_entries(j) {
            let anc = if j == lmin {
                0.0
            } else {
                let (pa, panc) = prev[&q.parent().index];
                f64::max(pa, panc)
            };
            cur.insert(q.index, (avg, anc));
            if avg > lambda.powi(k_min) {
                let k = if anc > 0.0 { ceil_power(lambda, anc).max(k_min) } else { k_min };
                if lambda.powi(k) < avg {
                    cubes.push(StoppingCube { cube: q, generation: k, average: avg });
                }
            }
        }
        prev = cur;
    }
    cubes.sort_by(|a, b| (a.generation, a.cube.level, a.cube.index).cmp(&(b.generation, b.cube.level, b.cube.index)));
    let lookup: HashMap<(i32, [i64; MAX_DIM]), usize> =
        cubes.iter().enumerate().map(|(i, c)| ((c.cube.level, c.cube.index), i)).collect();

    // Witness cells: λ^k < Mf ≤ λ^{k+1}, attached to the coarsest cube with
    // average above λ^k.
    let assignment: Vec<Option<usize>> = (0..grid.cell_count())
        .into_par_iter()
        .map(|i| {
            let x = grid.cell_center(i);
            let avgs: Vec<(DyadicCube, f64)> = (lmin..=lmax).map(|j| table.locate(j, &x)).collect();
            let m = avgs.iter().map(|p| p.1).fold(0.0, f64::max);
            if m <= lambda.powi(k_min) {
                return None;
            }
            let mut k = k_min;
            while lambda.powi(k + 1) < m {
                k += 1;
            }
            let level = avgs.iter().find(|p| p.1 > lambda.powi(k))?.0;
            lookup.get(&(level.level, level.index)).copied()
        })
        .collect();
    let mut witnesses = vec![Vec::new(); cubes.len()];
    for (cell, a) in assignment.into_iter().enumerate() {
        if let Some(i) = a {
            witnesses[i].push(cell);
        }
    }
    let eta_achieved = cubes
        .iter()
        .zip(&witnesses)
        .map(|(c, w)| w.len() as f64 * grid.cell_volume() / c.cube.measure())
        .fold(f64::INFINITY, f64::min);
    let mut family = empty(eta_achieved.min(1.0));
    family.cubes = cubes;
    family.witnesses = witnesses;
    Ok(family)
}

/// Cells whose centres lie in `q`.
pub fn cells_in_cube(grid: &SampleBox, q: &DyadicCube) -> Vec<usize> {
    let n = grid.cells_per_axis() as i64;
    let (l, h) = (grid.halfwidth(), grid.cell_width());
    let mut ranges = [(0i64, -1i64); MAX_DIM];
    for k in 0..grid.dim() {
        let lo = ((q.lower(k) + l) / h - 0.5).ceil() as i64 - 1;
        let hi = ((q.upper(k) + l) / h - 0.5).ceil() as i64;
        ranges[k] = (lo.max(0), hi.min(n - 1));
        if ranges[k].0 > ranges[k].1 {
            return Vec::new();
        }
    }
    let mut out = Vec::new();
    let mut idx = [0usize; MAX_DIM];
    let dim = grid.dim();
    let total: i64 = (0..dim).map(|k| ranges[k].1 - ranges[k].0 + 1).product();
    for mut t in 0..total {
        for k in (0..dim).rev() {
            let len = ranges[k].1 - ranges[k].0 + 1;
            idx[k] = (ranges[k].0 + t % len) as usize;
            t /= len;
        }
        let flat = grid.flat_index(&idx[..dim]);
        let c = grid.cell_center(flat);
        if DyadicCube::locate(dim, &q.shift, q.level, &c) == *q {
            out.push(flat);
        }
    }
    out.sort_unstable();
    out
}

/// `Λ^γ_S f = Σ_{Q∈S} |Q|^{γ/n} ⟨f⟩_Q χ_Q` on the grid of `f`.
pub fn sparse_apply(family: &SparseFamily, gamma: f64, f: &SampledField) -> Result<SampledField> {
    let grid = f.grid();
    let n = grid.dim() as f64;
    if !(0.0..=n).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("need 0 <= gamma <= n, got {gamma}")));
    }
    if family.grid != *grid {
        return Err(Error::InvalidParameter("family built on a different grid".into()));
    }
    let mut values = vec![0.0; grid.cell_count()];
    for c in &family.cubes {
        let m = c.cube.measure();
        let coef = m.powf(gamma / n) * f.cube_integral(&c.cube) / m;
        for i in cells_in_cube(grid, &c.cube) {
            values[i] += coef;
        }
    }
    f.with_values(values)
}

/// `Λ^γ` summed over every scan cube (all shifts) with nonzero average of `|f|`.
pub fn scan_sum(f: &SampledField, gamma: f64, scan: &CubeScan) -> Result<SampledField> {
    let n = f.grid().dim() as f64;
    if !(0.0..=n).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("need 0 <= gamma <= n, got {gamma}")));
    }
    let fa = abs_field(f);
    let mut shifts = scan.shifts.clone();
    shifts.sort();
    let tables = shifts.iter().map(|s| LevelTable::new(&fa, s, scan)).collect::<Result<Vec<_>>>()?;
    let grid = *f.grid();
    let values = (0..grid.cell_count())
        .into_par_iter()
        .map(|i| {
            let x = grid.cell_center(i);
            tables
                .iter()
                .flat_map(|t| (t.level_min()..=t.level_max()).map(move |j| (j, t)))
                .map(|(j, t)| (-(j as f64) * gamma).exp2() * t.locate(j, &x).1)
                .sum()
        })
        .collect();
    f.with_values(values)
}

/// Sparse families for every shift of the scan, in sorted shift order.
pub fn build_all(f: &SampledField, lambda: f64, scan: &CubeScan) -> Result<Vec<SparseFamily>> {
    let mut shifts = scan.shifts.clone();
    shifts.sort();
    shifts.par_iter().map(|s| build_sparse(f, s, lambda, scan)).collect()
}

/// `Σ_a Λ^γ_{S^a} f`.
pub fn sparse_sum(families: &[SparseFamily], gamma: f64, f: &SampledField) -> Result<SampledField> {
    let mut acc = vec![0.0; f.grid().cell_count()];
    for s in families {
        let part = sparse_apply(s, gamma, f)?;
        for (a, v) in acc.iter_mut().zip(part.values()) {
            *a += v;
        }
    }
    f.with_values(acc)
}

/// Outcome of comparing the full scan sum with the sparse sum.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricReport {
    /// `max Λ_scan / (λ Σ_a Λ_{S^a})` over cells above the floor.
    pub c_geom: f64,
    pub cells_checked: usize,
}

/// Measures `C_geom` in `Λ^γ_scan f <= λ C_geom Σ_a Λ^γ_{S^a} f`.
pub fn geometric_constant(f: &SampledField, gamma: f64, lambda: f64, scan: &CubeScan) -> Result<GeometricReport> {
    let families = build_all(f, lambda, scan)?;
    let den = sparse_sum(&families, gamma, f)?;
    let num = scan_sum(f, gamma, scan)?;
    let floor = DENOMINATOR_FLOOR * den.max();
    let mut c: f64 = 0.0;
    let mut checked = 0;
    for (a, b) in num.values().iter().zip(den.values()) {
        if *b > floor && *b > 0.0 {
            c = c.max(a / (lambda * b));
            checked += 1;
        }
    }
    if checked == 0 {
        return Err(Error::VanishingSparseSum);
    }
    Ok(GeometricReport { c_geom: c, cells_checked: checked })
}

/// Per-time maxima of `e^{tΔ}f / (t^{-γ/2} Σ_a Λ^γ_{S^a} f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport {
    pub max_ratio: f64,
    pub per_time: Vec<(f64, f64)>,
}

/// Pointwise comparison of the heat flow with the sparse sum over all
/// shifts of `scan`, restricted to cells where the sparse sum exceeds
/// [`DENOMINATOR_FLOOR`] times its maximum.
pub fn domination_ratio(
    f: &SampledField,
    gamma: f64,
    times: &[f64],
    lambda: f64,
    scan: &CubeScan,
    tail_tol: f64,
) -> Result<DominationReport> {
    check_nonnegative(f)?;
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time list".into()));
    }
    let families = build_all(f, lambda, scan)?;
    let den = sparse_sum(&families, gamma, f)?;
    let floor = DENOMINATOR_FLOOR * den.max();
    if !(den.max() > 0.0) {
        return Err(Error::VanishingSparseSum);
    }
    let per_time = times
        .par_iter()
        .map(|&t| {
            let u = HeatKernel::new(f.grid(), t, tail_tol)?.apply(f)?;
            let scale = t.powf(-0.5 * gamma);
            let r = u
                .values()
                .iter()
                .zip(den.values())
                .filter(|(_, d)| **d > floor)
                .map(|(v, d)| v / (scale * d))
                .fold(0.0, f64::max);
            Ok((t, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = per_time.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(DominationReport { max_ratio, per_time })
}

/// `K_d = ∫ |y|^{γ-n} dy` over the cell centred at `d h`, for `d >= 0`
/// componentwise; indexed like a grid of `N^n` cells.
fn riesz_kernel_table(grid: &SampleBox, gamma: f64) -> Result<Vec<f64>> {
    let dim = grid.dim();
    let n = grid.cells_per_axis();
    let h = grid.cell_width();
    let e = gamma - dim as f64;
    if dim == 1 {
        let anti = |u: f64| u.signum() * u.abs().powf(gamma) / gamma;
        return Ok((0..n).map(|d| anti((d as f64 + 0.5) * h) - anti((d as f64 - 0.5) * h)).collect());
    }
    let adaptive = Adaptive::new();
    let rule = GaussLegendre::new(4);
    let kernel = |y: &[f64]| {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        r2.powf(0.5 * e)
    };
    let count = n.pow(dim as u32);
    (0..count)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut d = [0usize; MAX_DIM];
            for k in (0..dim).rev() {
                d[k] = rem % n;
                rem /= n;
            }
            let mut lo = [0.0; MAX_DIM];
            let mut hi = [0.0; MAX_DIM];
            for k in 0..dim {
                lo[k] = (d[k] as f64 - 0.5) * h;
                hi[k] = (d[k] as f64 + 0.5) * h;
            }
            let near = d[..dim].iter().all(|&v| v <= 2);
            if d[..dim].iter().all(|&v| v == 0) {
                adaptive.integrate_singular(dim, &lo[..dim], &hi[..dim], &kernel, e, 1e-10)
            } else if near {
                Ok(adaptive.integrate(dim, &lo[..dim], &hi[..dim], &kernel, 1e-10))
            } else {
                Ok(rule.integrate_box(dim, &lo[..dim], &hi[..dim], &kernel))
            }
        })
        .collect()
}

/// `I_γ f(x) = ∫ f(y) |x-y|^{γ-n} dy` at the cell centres, with the kernel
/// integrated over each source cell.
pub fn fractional_integral(f: &SampledField, gamma: f64) -> Result<SampledField> {
    let grid = *f.grid();
    let dim = grid.dim();
    if !(gamma > 0.0 && gamma < dim as f64) {
        return Err(Error::InvalidParameter(format!("need 0 < gamma < n, got {gamma}")));
    }
    let table = riesz_kernel_table(&grid, gamma)?;
    let n = grid.cells_per_axis();
    let src: Vec<(usize, [usize; MAX_DIM], f64)> =
        f.values().iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, grid.multi_index(j), *v)).collect();
    let values = (0..grid.cell_count())
        .into_par_iter()
        .map(|i| {
            let xi = grid.multi_index(i);
            src.iter()
                .map(|(_, yj, v)| {
                    let mut flat = 0;
                    for k in 0..dim {
                        flat = flat * n + xi[k].abs_diff(yj[k]);
                    }
                    v * table[flat]
                })
                .sum()
        })
        .collect();
    f.with_values(values)
}
