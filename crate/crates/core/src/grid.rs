//! Sampled fields on a truncated box and shifted dyadic cube arithmetic.
//!
//! A [`SampleBox`] is the cube `[-L, L)^n` split into `N^n` cells of width
//! `h = 2L/N`. A [`SampledField`] stores one value per cell, interpreted as
//! the cell average of the underlying function (zero outside the box).
//!
//! Shifted dyadic cubes follow the convention
//! `Q = 2^{-j}([0,1)^n + m + (-1)^j a/3)` with `a ∈ {0,1,2}^n`; for a fixed
//! shift the cubes form a nested grid, and every cube of `R^n` sits inside a
//! shifted cube of comparable size ([`shifted_cover`]).

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Maximum supported dimension.
pub const MAX_DIM: usize = 3;

/// Default cap on the number of cubes a scan may generate.
pub const DEFAULT_SCAN_CAP: u64 = 10_000_000;

pub type Point = [f64; MAX_DIM];

/// The truncated computational box `[-L, L)^n` with `N` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBox {
    dim: usize,
    halfwidth: f64,
    cells: usize,
}

impl SampleBox {
    pub fn new(dim: usize, halfwidth: f64, cells: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidParameter(format!("dimension must be in 1..=3, got {dim}")));
        }
        if !(halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(Error::InvalidParameter(format!("halfwidth must be positive, got {halfwidth}")));
        }
        if cells == 0 || !cells.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("cells per axis must be a power of two, got {cells}")));
        }
        Ok(Self { dim, halfwidth, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    /// Cell width `h = 2L/N`.
    pub fn cell_width(&self) -> f64 {
        2.0 * self.halfwidth / self.cells as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_width().powi(self.dim as i32)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.halfwidth).powi(self.dim as i32)
    }

    /// Same cells, twice the halfwidth.
    pub fn doubled(&self) -> Self {
        Self { halfwidth: 2.0 * self.halfwidth, ..*self }
    }

    /// Multi-index of a flat cell index; axis 0 is the most significant.
    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0usize; MAX_DIM];
        for k in (0..self.dim).rev() {
            out[k] = flat % self.cells;
            flat /= self.cells;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0usize, |acc, &i| acc * self.cells + i)
    }

    /// Stride (in flat indices) of a step along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.cells.pow((self.dim - 1 - axis) as u32)
    }

    pub fn cell_center(&self, flat: usize) -> Point {
        let idx = self.multi_index(flat);
        let h = self.cell_width();
        let mut p = [0.0; MAX_DIM];
        for k in 0..self.dim {
            p[k] = -self.halfwidth + (idx[k] as f64 + 0.5) * h;
        }
        p
    }

    /// Lower and upper corners of a cell.
    pub fn cell_bounds(&self, flat: usize) -> (Point, Point) {
        let idx = self.multi_index(flat);
        let h = self.cell_width();
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        for k in 0..self.dim {
            lo[k] = -self.halfwidth + idx[k] as f64 * h;
            hi[k] = lo[k] + h;
        }
        (lo, hi)
    }

    /// Measure of `[lo, hi) ∩ box`.
    pub fn overlap_measure(&self, lo: &[f64], hi: &[f64]) -> f64 {
        (0..self.dim).map(|k| (hi[k].min(self.halfwidth) - lo[k].max(-self.halfwidth)).max(0.0)).product()
    }
}

/// Cell-average samples of a function on a [`SampleBox`].
#[derive(Debug)]
pub struct SampledField {
    grid: SampleBox,
    values: Vec<f64>,
    cumulative: OnceLock<Vec<f64>>,
}

impl Clone for SampledField {
    fn clone(&self) -> Self {
        Self { grid: self.grid, values: self.values.clone(), cumulative: OnceLock::new() }
    }
}

impl PartialEq for SampledField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl SampledField {
    pub fn new(grid: SampleBox, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value at cell {bad}")));
        }
        Ok(Self { grid, values, cumulative: OnceLock::new() })
    }

    pub fn zeros(grid: SampleBox) -> Self {
        Self { grid, values: vec![0.0; grid.cell_count()], cumulative: OnceLock::new() }
    }

    pub fn constant(grid: SampleBox, c: f64) -> Self {
        Self { grid, values: vec![c; grid.cell_count()], cumulative: OnceLock::new() }
    }

    /// Samples `f` at cell centres (midpoint approximation of cell averages).
    pub fn from_fn(grid: SampleBox, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.cell_count()).map(|i| f(&grid.cell_center(i)[..grid.dim()])).collect();
        Self::new(grid, values)
    }

    /// Cell averages of `f` by a tensor Gauss-Legendre rule of `order` points per axis.
    pub fn from_fn_averaged(grid: SampleBox, order: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let rule = crate::quadrature::GaussLegendre::new(order);
        let vol = grid.cell_volume();
        let values = (0..grid.cell_count())
            .map(|i| {
                let (lo, hi) = grid.cell_bounds(i);
                rule.integrate_box(grid.dim(), &lo, &hi, &f) / vol
            })
            .collect();
        Self::new(grid, values)
    }

    /// Replaces values, keeping the grid.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid, values)
    }

    pub fn grid(&self) -> &SampleBox {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * c).collect(), cumulative: OnceLock::new() }
    }

    /// `∫ f = h^n Σ values`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn cumulative(&self) -> &[f64] {
        self.cumulative.get_or_init(|| {
            let n = self.grid.cells;
            let dim = self.grid.dim;
            let side = n + 1;
            let total = side.pow(dim as u32);
            let vol = self.grid.cell_volume();
            let mut table = vec![0.0; total];
            // Corner c accumulates all cells with index < c componentwise.
            for (flat, v) in self.values.iter().enumerate() {
                let idx = self.grid.multi_index(flat);
                let corner = idx[..dim].iter().fold(0usize, |acc, &i| acc * side + (i + 1));
                table[corner] = v * vol;
            }
            for axis in 0..dim {
                let stride = side.pow((dim - 1 - axis) as u32);
                for c in 0..total {
                    let coord = (c / stride) % side;
                    if coord > 0 {
                        table[c] += table[c - stride];
                    }
                }
            }
            table
        })
    }

    /// `∫_{-L}^{x}` of the piecewise-constant reconstruction (exact multilinear
    /// interpolation of the cumulative table).
    fn cumulative_at(&self, x: &[f64]) -> f64 {
        let dim = self.grid.dim;
        let n = self.grid.cells;
        let side = n + 1;
        let h = self.grid.cell_width();
        let table = self.cumulative();
        let mut base = [0usize; MAX_DIM];
        let mut frac = [0.0; MAX_DIM];
        for k in 0..dim {
            let u = ((x[k] + self.grid.halfwidth) / h).clamp(0.0, n as f64);
            let i = (u.floor() as usize).min(n - 1);
            base[k] = i;
            frac[k] = u - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << dim) {
            let mut weight = 1.0;
            let mut flat = 0usize;
            for k in 0..dim {
                let bit = (corner >> k) & 1;
                weight *= if bit == 1 { frac[k] } else { 1.0 - frac[k] };
                flat = flat * side + base[k] + bit;
            }
            if weight != 0.0 {
                acc += weight * table[flat];
            }
        }
        acc
    }

    /// `∫_{[lo,hi)} f` with zero extension outside the box.
    pub fn box_integral(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let dim = self.grid.dim;
        let l = self.grid.halfwidth;
        let mut a = [0.0; MAX_DIM];
        let mut b = [0.0; MAX_DIM];
        for k in 0..dim {
            a[k] = lo[k].clamp(-l, l);
            b[k] = hi[k].clamp(-l, l);
            if b[k] <= a[k] {
                return 0.0;
            }
        }
        let mut acc = 0.0;
        let mut pt = [0.0; MAX_DIM];
        for corner in 0..(1usize << dim) {
            let mut sign = 1.0;
            for k in 0..dim {
                if (corner >> k) & 1 == 1 {
                    pt[k] = b[k];
                } else {
                    pt[k] = a[k];
                    sign = -sign;
                }
            }
            acc += sign * self.cumulative_at(&pt[..dim]);
        }
        acc
    }

    /// Integral of `f` over a dyadic cube.
    pub fn cube_integral(&self, q: &DyadicCube) -> f64 {
        let (lo, hi) = q.bounds();
        self.box_integral(&lo[..q.dim], &hi[..q.dim])
    }
}

/// A cube of the shifted dyadic grid `D^a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    pub dim: usize,
    pub shift: [u8; MAX_DIM],
    pub level: i32,
    pub index: [i64; MAX_DIM],
}

/// `(-1)^j`.
#[inline]
pub fn level_sign(level: i32) -> i64 {
    if level.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl DyadicCube {
    pub fn new(dim: usize, shift: &[u8], level: i32, index: &[i64]) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) || shift.len() != dim || index.len() != dim {
            return Err(Error::InvalidParameter("cube shift/index length must equal dimension".into()));
        }
        if shift.iter().any(|&a| a > 2) {
            return Err(Error::InvalidParameter("shift entries must be in {0,1,2}".into()));
        }
        let mut s = [0u8; MAX_DIM];
        let mut m = [0i64; MAX_DIM];
        s[..dim].copy_from_slice(shift);
        m[..dim].copy_from_slice(index);
        Ok(Self { dim, shift: s, level, index: m })
    }

    pub fn side(&self) -> f64 {
        (-self.level as f64).exp2()
    }

    pub fn measure(&self) -> f64 {
        self.side().powi(self.dim as i32)
    }

    /// Offset `(-1)^j a_k / 3` along `axis`.
    fn offset(&self, axis: usize) -> f64 {
        (level_sign(self.level) * self.shift[axis] as i64) as f64 / 3.0
    }

    pub fn lower(&self, axis: usize) -> f64 {
        (self.index[axis] as f64 + self.offset(axis)) * self.side()
    }

    pub fn upper(&self, axis: usize) -> f64 {
        (self.index[axis] as f64 + 1.0 + self.offset(axis)) * self.side()
    }

    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        for k in 0..self.dim {
            lo[k] = self.lower(k);
            hi[k] = self.upper(k);
        }
        (lo, hi)
    }

    /// Index of the cube of the same shift at `level` that contains `x`.
    pub fn locate(dim: usize, shift: &[u8], level: i32, x: &[f64]) -> Self {
        let sign = level_sign(level);
        let scale = (level as f64).exp2();
        let mut index = [0i64; MAX_DIM];
        let mut s = [0u8; MAX_DIM];
        for k in 0..dim {
            s[k] = shift[k];
            let off = (sign * shift[k] as i64) as f64 / 3.0;
            index[k] = (x[k] * scale - off).floor() as i64;
        }
        Self { dim, shift: s, level, index }
    }

    /// Parent at `level - 1` (same shift).
    pub fn parent(&self) -> Self {
        // Child index m' = 2m + c + (-1)^{j-1} a, with j-1 the parent level.
        let parent_level = self.level - 1;
        let sign = level_sign(parent_level);
        let mut index = self.index;
        for k in 0..self.dim {
            index[k] = (self.index[k] - sign * self.shift[k] as i64).div_euclid(2);
        }
        Self { level: parent_level, index, ..*self }
    }

    /// The `2^n` children at `level + 1`.
    pub fn children(&self) -> Vec<Self> {
        let sign = level_sign(self.level);
        (0..(1usize << self.dim))
            .map(|c| {
                let mut index = self.index;
                for k in 0..self.dim {
                    let bit = ((c >> (self.dim - 1 - k)) & 1) as i64;
                    index[k] = 2 * self.index[k] + bit + sign * self.shift[k] as i64;
                }
                Self { level: self.level + 1, index, ..*self }
            })
            .collect()
    }

    /// Exact lower bound along `axis` in units of `2^{-reference}/3`
    /// (requires `reference >= level`).
    pub fn lower_units(&self, axis: usize, reference: i32) -> i128 {
        let scale = 1i128 << (reference - self.level);
        scale * (3 * self.index[axis] as i128 + (level_sign(self.level) * self.shift[axis] as i64) as i128)
    }

    pub fn upper_units(&self, axis: usize, reference: i32) -> i128 {
        self.lower_units(axis, reference) + 3 * (1i128 << (reference - self.level))
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        (0..self.dim).all(|k| self.lower(k) <= x[k] && x[k] < self.upper(k))
    }
}

/// Mean of `f` over `q` with zero extension outside the box.
pub fn cube_average(f: &SampledField, q: &DyadicCube) -> Result<f64> {
    let (lo, hi) = q.bounds();
    if q.dim != f.grid().dim() || f.grid().overlap_measure(&lo[..q.dim], &hi[..q.dim]) <= 0.0 {
        return Err(Error::EmptyIntersection);
    }
    Ok(f.cube_integral(q) / q.measure())
}

/// Default search bound for [`shifted_cover`]: side lengths up to 8 ℓ(Q).
pub const COVER_SEARCH_RATIO: f64 = 8.0;

/// Smallest shifted dyadic cube containing the cube `[low, high)`.
///
/// Returns the cube and the side-length ratio `ℓ(Q̃)/ℓ(Q)`. Levels are
/// searched from the finest admissible one upward, shifts in lexicographic
/// order.
pub fn shifted_cover(low: &[f64], high: &[f64]) -> Result<(DyadicCube, f64)> {
    shifted_cover_with(low, high, COVER_SEARCH_RATIO)
}

pub fn shifted_cover_with(low: &[f64], high: &[f64], max_ratio: f64) -> Result<(DyadicCube, f64)> {
    let dim = low.len();
    if dim != high.len() || !(1..=MAX_DIM).contains(&dim) {
        return Err(Error::InvalidParameter("corner dimensions differ".into()));
    }
    if low.iter().zip(high).any(|(a, b)| !(a < b)) {
        return Err(Error::InvalidParameter("need low < high componentwise".into()));
    }
    let side = high[0] - low[0];
    if high.iter().zip(low).any(|(b, a)| ((b - a) - side).abs() > 1e-9 * side) {
        return Err(Error::InvalidParameter("input is not a cube".into()));
    }
    let finest = (-side.log2()).floor() as i32;
    let coarsest = (-(max_ratio * side).log2()).ceil() as i32;
    let shifts = all_shifts(dim);
    for level in (coarsest..=finest).rev() {
        let cube_side = (-level as f64).exp2();
        if cube_side < side {
            continue;
        }
        'shift: for shift in &shifts {
            let mut cube = DyadicCube::locate(dim, &shift[..dim], level, low);
            for k in 0..dim {
                if cube.lower(k) > low[k] {
                    cube.index[k] -= 1;
                }
                if cube.upper(k) <= low[k] {
                    cube.index[k] += 1;
                }
                if !(cube.lower(k) <= low[k] && high[k] <= cube.upper(k)) {
                    continue 'shift;
                }
            }
            return Ok((cube, cube_side / side));
        }
    }
    Err(Error::NoCover { low: low.to_vec(), high: high.to_vec(), max_ratio })
}

/// All `3^n` shifts in lexicographic order.
pub fn all_shifts(dim: usize) -> Vec<[u8; MAX_DIM]> {
    let mut out = Vec::with_capacity(3usize.pow(dim as u32));
    for code in 0..3usize.pow(dim as u32) {
        let mut s = [0u8; MAX_DIM];
        let mut c = code;
        for k in (0..dim).rev() {
            s[k] = (c % 3) as u8;
            c /= 3;
        }
        out.push(s);
    }
    out
}

/// Finite family of shifted dyadic cubes standing in for "all cubes".
#[derive(Debug, Clone, PartialEq)]
pub struct CubeScan {
    pub shifts: Vec<[u8; MAX_DIM]>,
    pub level_min: i32,
    pub level_max: i32,
    pub restrict_to: SampleBox,
    pub cap: u64,
}

impl CubeScan {
    pub fn new(shifts: Vec<[u8; MAX_DIM]>, level_min: i32, level_max: i32, restrict_to: SampleBox) -> Result<Self> {
        let scan = Self { shifts, level_min, level_max, restrict_to, cap: DEFAULT_SCAN_CAP };
        scan.validate()?;
        Ok(scan)
    }

    /// Scan over all `3^n` shifts.
    pub fn all_shifts(level_min: i32, level_max: i32, restrict_to: SampleBox) -> Result<Self> {
        Self::new(all_shifts(restrict_to.dim()), level_min, level_max, restrict_to)
    }

    /// Scan over the standard dyadic grid only.
    pub fn standard(level_min: i32, level_max: i32, restrict_to: SampleBox) -> Result<Self> {
        Self::new(vec![[0; MAX_DIM]], level_min, level_max, restrict_to)
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn dim(&self) -> usize {
        self.restrict_to.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.level_min > self.level_max {
            return Err(Error::InvalidParameter(format!("empty level range {}..={}", self.level_min, self.level_max)));
        }
        if self.shifts.is_empty() {
            return Err(Error::EmptyScan);
        }
        let dim = self.dim();
        if self.shifts.iter().any(|s| s[..dim].iter().any(|&a| a > 2) || s[dim..].iter().any(|&a| a != 0)) {
            return Err(Error::InvalidParameter("shift entries must be in {0,1,2}".into()));
        }
        Ok(())
    }

    /// Range of indices along one axis whose cubes meet the open box.
    pub fn axis_range(&self, level: i32, shift_entry: u8) -> (i64, i64) {
        let scale = (level as f64).exp2();
        let off = (level_sign(level) * shift_entry as i64) as f64 / 3.0;
        let l = self.restrict_to.halfwidth() * scale;
        let lo = (-l - 1.0 - off).floor() as i64 + 1;
        let hi = (l - off).ceil() as i64 - 1;
        (lo, hi)
    }

    fn level_count(&self, shift: &[u8; MAX_DIM], level: i32) -> u64 {
        (0..self.dim())
            .map(|k| {
                let (lo, hi) = self.axis_range(level, shift[k]);
                (hi - lo + 1).max(0) as u64
            })
            .product()
    }

    pub fn count(&self) -> u64 {
        self.shifts.iter().map(|s| (self.level_min..=self.level_max).map(|j| self.level_count(s, j)).sum::<u64>()).sum()
    }

    /// Cubes of one shift and level, index-lexicographic.
    pub fn level_cubes(&self, shift: &[u8; MAX_DIM], level: i32) -> Vec<DyadicCube> {
        let dim = self.dim();
        let ranges: Vec<(i64, i64)> = (0..dim).map(|k| self.axis_range(level, shift[k])).collect();
        let mut out = Vec::with_capacity(self.level_count(shift, level) as usize);
        let mut idx = [0i64; MAX_DIM];
        fn rec(
            k: usize,
            dim: usize,
            ranges: &[(i64, i64)],
            idx: &mut [i64; MAX_DIM],
            shift: &[u8; MAX_DIM],
            level: i32,
            out: &mut Vec<DyadicCube>,
        ) {
            if k == dim {
                out.push(DyadicCube { dim, shift: *shift, level, index: *idx });
                return;
            }
            for m in ranges[k].0..=ranges[k].1 {
                idx[k] = m;
                rec(k + 1, dim, ranges, idx, shift, level, out);
            }
        }
        rec(0, dim, &ranges, &mut idx, shift, level, &mut out);
        out
    }

    /// All cubes, ordered by (shift, level, index).
    pub fn enumerate(&self) -> Result<Vec<DyadicCube>> {
        self.validate()?;
        let count = self.count();
        if count > self.cap {
            return Err(Error::ScanTooLarge { count, cap: self.cap });
        }
        let mut shifts = self.shifts.clone();
        shifts.sort();
        let mut out = Vec::with_capacity(count as usize);
        for s in &shifts {
            for j in self.level_min..=self.level_max {
                out.extend(self.level_cubes(s, j));
            }
        }
        Ok(out)
    }

    /// Scan with the level span doubled (each end moved out by half the
    /// span, at least one level) and the box halfwidth doubled.
    pub fn doubled(&self) -> Self {
        let ext = ((self.level_max - self.level_min + 1) / 2).max(1);
        Self {
            shifts: self.shifts.clone(),
            level_min: self.level_min - ext,
            level_max: self.level_max + ext,
            restrict_to: self.restrict_to.doubled(),
            cap: self.cap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_box(dim: usize) -> SampleBox {
        SampleBox::new(dim, 1.0, 16).unwrap()
    }

    #[test]
    fn box_rejects_bad_parameters() {
        assert!(SampleBox::new(4, 1.0, 8).is_err());
        assert!(SampleBox::new(1, 0.0, 8).is_err());
        assert!(SampleBox::new(1, 1.0, 12).is_err());
        let b = SampleBox::new(2, 3.0, 8).unwrap();
        assert_eq!(b.cell_width(), 0.75);
        assert_eq!(b.cell_count(), 64);
    }

    #[test]
    fn average_of_constant_field() {
        for dim in 1..=3 {
            let f = SampledField::constant(unit_box(dim), 7.0);
            let q = DyadicCube::new(dim, &vec![1; dim], 2, &vec![0; dim]).unwrap();
            assert_relative_eq!(cube_average(&f, &q).unwrap(), 7.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn midpoint_average_is_exact_for_affine() {
        let grid = SampleBox::new(1, 1.0, 64).unwrap();
        let f = SampledField::from_fn(grid, |x| x[0]).unwrap();
        let q = DyadicCube::new(1, &[0], 0, &[0]).unwrap();
        assert_relative_eq!(cube_average(&f, &q).unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn indicator_average() {
        let grid = SampleBox::new(1, 1.0, 64).unwrap();
        let f = SampledField::from_fn(grid, |x| if (0.0..0.5).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap();
        let q = DyadicCube::new(1, &[0], 0, &[0]).unwrap();
        assert_eq!(cube_average(&f, &q).unwrap(), 0.5);
    }

    #[test]
    fn partial_overlap_uses_fractional_volume() {
        // Cell width 1/8; the shifted cube [1/3, 4/3) covers [1/3, 1) of the box.
        let grid = SampleBox::new(1, 1.0, 16).unwrap();
        let f = SampledField::constant(grid, 1.0);
        let q = DyadicCube::new(1, &[1], 0, &[0]).unwrap();
        assert_relative_eq!(q.lower(0), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(cube_average(&f, &q).unwrap(), 2.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn disjoint_cube_is_an_error() {
        let f = SampledField::constant(unit_box(1), 1.0);
        let q = DyadicCube::new(1, &[0], 0, &[5]).unwrap();
        assert_eq!(cube_average(&f, &q), Err(Error::EmptyIntersection));
    }

    #[test]
    fn cover_of_aligned_cube_is_itself() {
        for dim in 1..=3 {
            let low = vec![0.0; dim];
            let high = vec![1.0; dim];
            let (q, ratio) = shifted_cover(&low, &high).unwrap();
            assert_eq!(ratio, 1.0);
            assert_eq!(q.level, 0);
            assert_eq!(&q.shift[..dim], &vec![0u8; dim][..]);
        }
    }

    #[test]
    fn enumerate_small_scans() {
        let b = SampleBox::new(1, 1.0, 8).unwrap();
        let scan = CubeScan::standard(0, 0, b).unwrap();
        let cubes = scan.enumerate().unwrap();
        assert_eq!(cubes.len(), 2);
        assert_eq!((cubes[0].lower(0), cubes[0].upper(0)), (-1.0, 0.0));
        assert_eq!((cubes[1].lower(0), cubes[1].upper(0)), (0.0, 1.0));
        let scan = CubeScan::standard(0, 1, b).unwrap();
        assert_eq!(scan.enumerate().unwrap().len(), 6);
        assert!(CubeScan::standard(1, 0, b).is_err());
    }

    #[test]
    fn scan_cap_is_enforced() {
        let b = SampleBox::new(3, 4.0, 8).unwrap();
        let scan = CubeScan::all_shifts(0, 6, b).unwrap().with_cap(1000);
        assert!(matches!(scan.enumerate(), Err(Error::ScanTooLarge { .. })));
    }

    #[test]
    fn parent_and_children_are_consistent() {
        for level in -3..4 {
            for a in 0..3u8 {
                let q = DyadicCube::new(2, &[a, 2 - a], level, &[3, -2]).unwrap();
                for c in q.children() {
                    assert_eq!(c.parent(), q);
                    let r = level + 1;
                    for k in 0..2 {
                        assert!(q.lower_units(k, r) <= c.lower_units(k, r));
                        assert!(c.upper_units(k, r) <= q.upper_units(k, r));
                    }
                }
            }
        }
    }

    #[test]
    fn locate_finds_containing_cube() {
        let x = [0.3, -0.71, 0.05];
        for level in -2..5 {
            for s in all_shifts(3) {
                let q = DyadicCube::locate(3, &s, level, &x);
                assert!(q.contains_point(&x));
            }
        }
    }
}
