//! Weight descriptors and their cube integrals.
//!
//! Analytic weights are `c |x|^h ⟨x⟩^b` and compositions of them; sampled
//! weights are piecewise constant on a [`SampleBox`] and vanish outside it.

mod ball;
mod constants;
mod region;

pub use ball::{ball_norm_oracle, BallCase, BallEnvelope};
pub use constants::{
    ap_constant, fujii_wilson, morrey_norm, theorem_constants, two_weight_constant, ConstantReport, InnerScan,
    ScanOptions, TheoremMode, DEFAULT_GROWTH_THRESHOLD,
};
pub use region::{check_region, is_ap_closed_form, ApKind, Corollary, RegionParams, RegionQuery, RegionReport};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{DyadicCube, SampleBox, SampledField, MAX_DIM};
use crate::quadrature::{integrable_at_origin, Adaptive, GaussLegendre};

use rayon::prelude::*;

/// Default relative tolerance for cube integrals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Exponent products this close to 1 collapse `(w^a)^b` back to `w`.
const UNIT_EXPONENT_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Constant(f64),
    /// `|x|^α`.
    PowerHom(f64),
    /// `⟨x⟩^α = (1 + |x|²)^{α/2}`.
    Bracket(f64),
    /// `|x|^hom ⟨x⟩^brk`.
    Product {
        hom: f64,
        brk: f64,
    },
    Sampled(Arc<SampledField>),
    PowerOf {
        base: Box<WeightSpec>,
        exponent: f64,
    },
    ProductOf(Box<WeightSpec>, Box<WeightSpec>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    dim: usize,
    kind: WeightKind,
}

/// `c |x|^hom ⟨x⟩^brk`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Analytic {
    c: f64,
    hom: f64,
    brk: f64,
}

impl Analytic {
    fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let mut out = self.c;
        if self.hom != 0.0 {
            out *= r2.powf(0.5 * self.hom);
        }
        if self.brk != 0.0 {
            out *= (1.0 + r2).powf(0.5 * self.brk);
        }
        out
    }

    fn radial(&self, r: f64) -> f64 {
        let mut out = self.c;
        if self.hom != 0.0 {
            out *= r.powf(self.hom);
        }
        if self.brk != 0.0 {
            out *= (1.0 + r * r).powf(0.5 * self.brk);
        }
        out
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("dimension must be in 1..=3, got {dim}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

impl WeightSpec {
    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        check_dim(dim)?;
        check_finite("constant", c)?;
        if c < 0.0 {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        Ok(Self { dim, kind: WeightKind::Constant(c) })
    }

    pub fn one(dim: usize) -> Result<Self> {
        Self::constant(dim, 1.0)
    }

    pub fn power_hom(dim: usize, alpha: f64) -> Result<Self> {
        check_dim(dim)?;
        check_finite("alpha", alpha)?;
        if !integrable_at_origin(alpha, dim) {
            return Err(Error::NotLocallyIntegrable(format!("|x|^{alpha} with alpha <= -{dim}")));
        }
        Ok(Self { dim, kind: WeightKind::PowerHom(alpha) })
    }

    pub fn bracket(dim: usize, alpha: f64) -> Result<Self> {
        check_dim(dim)?;
        check_finite("alpha", alpha)?;
        Ok(Self { dim, kind: WeightKind::Bracket(alpha) })
    }

    pub fn product(dim: usize, hom: f64, brk: f64) -> Result<Self> {
        check_dim(dim)?;
        check_finite("hom", hom)?;
        check_finite("brk", brk)?;
        if !integrable_at_origin(hom, dim) {
            return Err(Error::NotLocallyIntegrable(format!("|x|^{hom} factor with exponent <= -{dim}")));
        }
        Ok(Self { dim, kind: WeightKind::Product { hom, brk } })
    }

    pub fn sampled(field: SampledField) -> Result<Self> {
        if field.values().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter("sampled weight has negative values".into()));
        }
        Ok(Self { dim: field.grid().dim(), kind: WeightKind::Sampled(Arc::new(field)) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// `self^e`, with nested powers folded and unit powers removed.
    pub fn pow(&self, e: f64) -> Self {
        if e == 1.0 {
            return self.clone();
        }
        let dim = self.dim;
        if e == 0.0 {
            return Self { dim, kind: WeightKind::Constant(1.0) };
        }
        match &self.kind {
            WeightKind::Constant(c) => Self { dim, kind: WeightKind::Constant(c.powf(e)) },
            WeightKind::PowerOf { base, exponent } => {
                let total = exponent * e;
                if (total - 1.0).abs() <= UNIT_EXPONENT_SNAP {
                    (**base).clone()
                } else {
                    base.pow(total)
                }
            }
            WeightKind::ProductOf(l, r) => l.pow(e).mul_unchecked(&r.pow(e)),
            _ => Self { dim, kind: WeightKind::PowerOf { base: Box::new(self.clone()), exponent: e } },
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::InvalidParameter("weight dimensions differ".into()));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        match (&self.kind, &other.kind) {
            (WeightKind::Constant(a), _) if *a == 1.0 => other.clone(),
            (_, WeightKind::Constant(b)) if *b == 1.0 => self.clone(),
            (WeightKind::Constant(a), WeightKind::Constant(b)) => {
                Self { dim: self.dim, kind: WeightKind::Constant(a * b) }
            }
            _ => Self { dim: self.dim, kind: WeightKind::ProductOf(Box::new(self.clone()), Box::new(other.clone())) },
        }
    }

    fn analytic(&self) -> Option<Analytic> {
        match &self.kind {
            WeightKind::Constant(c) => Some(Analytic { c: *c, hom: 0.0, brk: 0.0 }),
            WeightKind::PowerHom(a) => Some(Analytic { c: 1.0, hom: *a, brk: 0.0 }),
            WeightKind::Bracket(a) => Some(Analytic { c: 1.0, hom: 0.0, brk: *a }),
            WeightKind::Product { hom, brk } => Some(Analytic { c: 1.0, hom: *hom, brk: *brk }),
            WeightKind::Sampled(_) => None,
            WeightKind::PowerOf { base, exponent } => base.analytic().map(|a| Analytic {
                c: a.c.powf(*exponent),
                hom: a.hom * exponent,
                brk: a.brk * exponent,
            }),
            WeightKind::ProductOf(l, r) => {
                let (a, b) = (l.analytic()?, r.analytic()?);
                Some(Analytic { c: a.c * b.c, hom: a.hom + b.hom, brk: a.brk + b.brk })
            }
        }
    }

    /// Exponent `e` with `w(x) ~ |x|^e` at the origin, treating sampled
    /// factors as locally constant.
    pub fn origin_exponent(&self) -> f64 {
        match &self.kind {
            WeightKind::Constant(_) | WeightKind::Bracket(_) | WeightKind::Sampled(_) => 0.0,
            WeightKind::PowerHom(a) => *a,
            WeightKind::Product { hom, .. } => *hom,
            WeightKind::PowerOf { base, exponent } => base.origin_exponent() * exponent,
            WeightKind::ProductOf(l, r) => l.origin_exponent() + r.origin_exponent(),
        }
    }

    /// The sampled field this weight depends on, if any (the first one found).
    fn sampled_grid(&self) -> Option<SampleBox> {
        match &self.kind {
            WeightKind::Sampled(f) => Some(*f.grid()),
            WeightKind::PowerOf { base, .. } => base.sampled_grid(),
            WeightKind::ProductOf(l, r) => l.sampled_grid().or_else(|| r.sampled_grid()),
            _ => None,
        }
    }

    fn sampled_grids(&self, out: &mut Vec<SampleBox>) {
        match &self.kind {
            WeightKind::Sampled(f) => out.push(*f.grid()),
            WeightKind::PowerOf { base, .. } => base.sampled_grids(out),
            WeightKind::ProductOf(l, r) => {
                l.sampled_grids(out);
                r.sampled_grids(out);
            }
            _ => {}
        }
    }

    /// Pointwise value; sampled factors use the cell containing `x` and
    /// vanish outside their box.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            WeightKind::Constant(c) => *c,
            WeightKind::PowerHom(a) => {
                if *a == 0.0 {
                    1.0
                } else {
                    x.iter().map(|v| v * v).sum::<f64>().powf(0.5 * a)
                }
            }
            WeightKind::Bracket(a) => (1.0 + x.iter().map(|v| v * v).sum::<f64>()).powf(0.5 * a),
            WeightKind::Product { hom, brk } => Analytic { c: 1.0, hom: *hom, brk: *brk }.eval(x),
            WeightKind::Sampled(f) => sampled_value(f, x),
            WeightKind::PowerOf { base, exponent } => base.eval(x).powf(*exponent),
            WeightKind::ProductOf(l, r) => l.eval(x) * r.eval(x),
        }
    }

    /// `w(Q)`.
    pub fn cube_integral(&self, q: &DyadicCube, tol: f64) -> Result<f64> {
        let (lo, hi) = q.bounds();
        self.box_integral(&lo[..q.dim], &hi[..q.dim], tol)
    }

    /// `∫_{[lo,hi)} w` to relative tolerance `tol`.
    pub fn box_integral(&self, lo: &[f64], hi: &[f64], tol: f64) -> Result<f64> {
        let dim = self.dim;
        if lo.len() != dim || hi.len() != dim {
            return Err(Error::InvalidParameter("box dimension mismatch".into()));
        }
        let vol: f64 = (0..dim).map(|k| (hi[k] - lo[k]).max(0.0)).product();
        if vol == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            WeightKind::Constant(c) => return Ok(c * vol),
            WeightKind::PowerHom(a) if *a == 0.0 => return Ok(vol),
            WeightKind::PowerHom(a) if dim == 1 => return power_1d(*a, lo[0], hi[0]),
            WeightKind::Sampled(f) => return Ok(f.box_integral(lo, hi)),
            _ => {}
        }
        if self.sampled_grid().is_some() {
            return self.sampled_box_integral(lo, hi, tol);
        }
        let a = self.analytic().expect("non-sampled weights are analytic");
        if a.c == 0.0 {
            return Ok(0.0);
        }
        if a.hom == 0.0 && a.brk == 0.0 {
            return Ok(a.c * vol);
        }
        let f = move |x: &[f64]| a.eval(x);
        Adaptive::new().integrate_singular(dim, lo, hi, &f, a.hom, tol)
    }

    /// Integral of a weight with sampled factors: restricted to the sampled
    /// boxes and split along their cell faces.
    fn sampled_box_integral(&self, lo: &[f64], hi: &[f64], tol: f64) -> Result<f64> {
        let dim = self.dim;
        let mut grids = Vec::new();
        self.sampled_grids(&mut grids);
        let mut a = [0.0; MAX_DIM];
        let mut b = [0.0; MAX_DIM];
        for k in 0..dim {
            a[k] = lo[k];
            b[k] = hi[k];
            for g in &grids {
                a[k] = a[k].max(-g.halfwidth());
                b[k] = b[k].min(g.halfwidth());
            }
            if b[k] <= a[k] {
                return Ok(0.0);
            }
        }
        // Cut points: union of all cell faces inside [a, b].
        let mut cuts: Vec<Vec<f64>> = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut c = vec![a[k], b[k]];
            for g in &grids {
                let h = g.cell_width();
                let first = ((a[k] + g.halfwidth()) / h).floor() as i64 + 1;
                let last = ((b[k] + g.halfwidth()) / h).ceil() as i64 - 1;
                for i in first..=last {
                    let x = -g.halfwidth() + i as f64 * h;
                    if x > a[k] && x < b[k] {
                        c.push(x);
                    }
                }
            }
            c.sort_by(|x, y| x.partial_cmp(y).unwrap());
            c.dedup();
            cuts.push(c);
        }
        let analytic_free = self.is_piecewise_constant();
        let exponent = self.origin_exponent();
        let adaptive = Adaptive::new();
        let counts: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
        let total: usize = counts.iter().product();
        let mut acc = 0.0;
        let mut plo = [0.0; MAX_DIM];
        let mut phi = [0.0; MAX_DIM];
        let mut mid = [0.0; MAX_DIM];
        for code in 0..total {
            let mut c = code;
            for k in (0..dim).rev() {
                let i = c % counts[k];
                c /= counts[k];
                plo[k] = cuts[k][i];
                phi[k] = cuts[k][i + 1];
                mid[k] = 0.5 * (plo[k] + phi[k]);
            }
            let piece = if analytic_free {
                let vol: f64 = (0..dim).map(|k| phi[k] - plo[k]).product();
                let v = self.eval(&mid[..dim]);
                if v == 0.0 {
                    0.0
                } else {
                    v * vol
                }
            } else {
                let f = |x: &[f64]| self.eval(x);
                adaptive.integrate_singular(dim, &plo[..dim], &phi[..dim], &f, exponent, tol)?
            };
            if !piece.is_finite() {
                return Err(Error::NotLocallyIntegrable(
                    "sampled weight raised to a negative power vanishes on a cell".into(),
                ));
            }
            acc += piece;
        }
        Ok(acc)
    }

    fn is_piecewise_constant(&self) -> bool {
        match &self.kind {
            WeightKind::Constant(_) | WeightKind::Sampled(_) => true,
            WeightKind::PowerHom(a) | WeightKind::Bracket(a) => *a == 0.0,
            WeightKind::Product { hom, brk } => *hom == 0.0 && *brk == 0.0,
            WeightKind::PowerOf { base, .. } => base.is_piecewise_constant(),
            WeightKind::ProductOf(l, r) => l.is_piecewise_constant() && r.is_piecewise_constant(),
        }
    }

    /// Essential infimum over the closed box `[lo, hi]`.
    pub fn box_ess_inf(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let dim = self.dim;
        if let Some(a) = self.analytic() {
            // Radial weight: the minimum sits at the nearest or farthest
            // point, or at the interior critical radius.
            let mut rmin2 = 0.0;
            let mut rmax2 = 0.0;
            for k in 0..dim {
                let near = if lo[k] > 0.0 {
                    lo[k]
                } else if hi[k] < 0.0 {
                    -hi[k]
                } else {
                    0.0
                };
                let far = lo[k].abs().max(hi[k].abs());
                rmin2 += near * near;
                rmax2 += far * far;
            }
            let (rmin, rmax) = (rmin2.sqrt(), rmax2.sqrt());
            let mut best = a.radial(rmin).min(a.radial(rmax));
            if a.hom * a.brk < 0.0 && a.hom + a.brk != 0.0 {
                let r2 = -a.hom / (a.hom + a.brk);
                if r2 > 0.0 {
                    let r = r2.sqrt();
                    if r > rmin && r < rmax {
                        best = best.min(a.radial(r));
                    }
                }
            }
            return best;
        }
        // Sampled factors: lattice of points including all cell centres met.
        let h = self.sampled_grid().map(|g| g.cell_width()).unwrap_or(f64::INFINITY);
        let mut counts = [1usize; MAX_DIM];
        for k in 0..dim {
            counts[k] = (((hi[k] - lo[k]) / h).ceil() as usize * 2 + 1).clamp(9, 4097);
        }
        let total: usize = counts[..dim].iter().product();
        let mut best = f64::INFINITY;
        let mut x = [0.0; MAX_DIM];
        for code in 0..total {
            let mut c = code;
            for k in (0..dim).rev() {
                let i = c % counts[k];
                c /= counts[k];
                let t = (i as f64 + 0.5) / counts[k] as f64;
                x[k] = lo[k] + t * (hi[k] - lo[k]);
            }
            best = best.min(self.eval(&x[..dim]));
        }
        best
    }

    /// `∫_{[lo,hi)} log w`.
    pub fn box_log_integral(&self, lo: &[f64], hi: &[f64], tol: f64) -> Result<f64> {
        let dim = self.dim;
        if let Some(a) = self.analytic() {
            if a.c == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            let f = move |x: &[f64]| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                a.c.ln() + 0.5 * a.hom * r2.ln() + 0.5 * a.brk * (1.0 + r2).ln()
            };
            if a.hom == 0.0 {
                return Ok(Adaptive::new().integrate(dim, lo, hi, &f, tol));
            }
            return Adaptive::new().integrate_singular(dim, lo, hi, &f, 0.0, tol);
        }
        let log_w = self.clone();
        let g = move |x: &[f64]| log_w.eval(x).ln();
        let adaptive = Adaptive::new();
        Ok(adaptive.integrate(dim, lo, hi, &g, tol))
    }
}

fn sampled_value(f: &SampledField, x: &[f64]) -> f64 {
    let g = f.grid();
    let h = g.cell_width();
    let mut idx = [0usize; MAX_DIM];
    for k in 0..g.dim() {
        let u = (x[k] + g.halfwidth()) / h;
        if !(0.0..g.cells_per_axis() as f64).contains(&u) {
            return 0.0;
        }
        idx[k] = u.floor() as usize;
    }
    f.values()[g.flat_index(&idx)]
}

/// `∫_a^b |x|^α dx` in closed form.
fn power_1d(alpha: f64, a: f64, b: f64) -> Result<f64> {
    if !integrable_at_origin(alpha, 1) && a <= 0.0 && 0.0 <= b {
        return Err(Error::NotLocallyIntegrable(format!("|x|^{alpha} near 0")));
    }
    let anti = |x: f64| x.signum() * x.abs().powf(alpha + 1.0) / (alpha + 1.0);
    Ok(anti(b) - anti(a))
}

/// Cells at least this many diagonals from the origin take a fixed 4-point
/// tensor rule for analytic weights; its error there is below 1e-12.
const FAR_CELL_DIAGONALS: f64 = 16.0;

impl WeightSpec {
    /// `∫ w` over every cell of `grid`, in flat order.
    pub fn grid_integrals(&self, grid: &SampleBox, tol: f64) -> Result<Vec<f64>> {
        if grid.dim() != self.dim {
            return Err(Error::InvalidParameter("weight and grid dimensions differ".into()));
        }
        let dim = self.dim;
        let rule = GaussLegendre::new(4);
        let diag = grid.cell_width() * (dim as f64).sqrt();
        let analytic = self.analytic();
        (0..grid.cell_count())
            .into_par_iter()
            .map(|i| {
                let (lo, hi) = grid.cell_bounds(i);
                let dist2: f64 = (0..dim)
                    .map(|k| {
                        let d = if lo[k] > 0.0 {
                            lo[k]
                        } else if hi[k] < 0.0 {
                            -hi[k]
                        } else {
                            0.0
                        };
                        d * d
                    })
                    .sum();
                match analytic {
                    Some(a) if (a.hom != 0.0 || a.brk != 0.0) && dist2.sqrt() >= FAR_CELL_DIAGONALS * diag => {
                        return Ok(rule.integrate_box(dim, &lo[..dim], &hi[..dim], &|x: &[f64]| self.eval(x)));
                    }
                    _ => {}
                }
                self.box_integral(&lo[..dim], &hi[..dim], tol)
            })
            .collect()
    }
}

/// `w(Q)` with relative tolerance `tol`.
pub fn weight_integral(w: &WeightSpec, q: &DyadicCube, tol: f64) -> Result<f64> {
    if q.dim != w.dim() {
        return Err(Error::InvalidParameter("cube and weight dimensions differ".into()));
    }
    w.cube_integral(q, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_cube(dim: usize) -> DyadicCube {
        DyadicCube::new(dim, &vec![0; dim], 0, &vec![0; dim]).unwrap()
    }

    #[test]
    fn lebesgue_measure() {
        for dim in 1..=3 {
            let w = WeightSpec::power_hom(dim, 0.0).unwrap();
            assert_eq!(weight_integral(&w, &unit_cube(dim), 1e-10).unwrap(), 1.0);
        }
    }

    #[test]
    fn linear_weight_1d() {
        let w = WeightSpec::power_hom(1, 1.0).unwrap();
        assert_relative_eq!(weight_integral(&w, &unit_cube(1), 1e-10).unwrap(), 0.5);
    }

    #[test]
    fn rejects_non_integrable_power() {
        assert!(WeightSpec::power_hom(2, -2.0).is_err());
        assert!(WeightSpec::power_hom(1, -1.5).is_err());
        assert!(WeightSpec::power_hom(3, -2.9).is_ok());
    }

    #[test]
    fn composed_powers_collapse() {
        let w = WeightSpec::power_hom(1, 0.7).unwrap();
        let p: f64 = 2.5;
        let pp = p / (p - 1.0);
        let dual = w.pow(1.0 - pp);
        assert_eq!(dual.pow(1.0 - p), w);
        assert_eq!(w.pow(1.0), w);
    }

    #[test]
    fn composed_matches_analytic() {
        let a = WeightSpec::power_hom(2, 0.5).unwrap();
        let b = WeightSpec::bracket(2, -1.0).unwrap();
        let prod = a.mul(&b).unwrap();
        let direct = WeightSpec::product(2, 0.5, -1.0).unwrap();
        let q = DyadicCube::new(2, &[1, 2], -1, &[0, -1]).unwrap();
        let x = prod.cube_integral(&q, 1e-10).unwrap();
        let y = direct.cube_integral(&q, 1e-10).unwrap();
        assert_relative_eq!(x, y, max_relative = 1e-9);
    }

    #[test]
    fn sampled_weight_matches_field_integral() {
        let g = SampleBox::new(2, 1.0, 8).unwrap();
        let f = SampledField::from_fn(g, |x| 1.0 + x[0] * x[0] + x[1].abs()).unwrap();
        let w = WeightSpec::sampled(f.clone()).unwrap();
        let sq = w.pow(2.0);
        let q = DyadicCube::new(2, &[1, 0], 1, &[0, -1]).unwrap();
        let (lo, hi) = q.bounds();
        assert_relative_eq!(
            w.cube_integral(&q, 1e-10).unwrap(),
            f.box_integral(&lo[..2], &hi[..2]),
            max_relative = 1e-12
        );
        let f2 = f.map(|v| v * v).unwrap();
        assert_relative_eq!(
            sq.cube_integral(&q, 1e-10).unwrap(),
            f2.box_integral(&lo[..2], &hi[..2]),
            max_relative = 1e-12
        );
    }

    #[test]
    fn ess_inf_of_radial_weights() {
        let w = WeightSpec::power_hom(2, 1.0).unwrap();
        assert_eq!(w.box_ess_inf(&[-1.0, -1.0], &[1.0, 1.0]), 0.0);
        assert_relative_eq!(w.box_ess_inf(&[3.0, 4.0], &[5.0, 5.0]), 5.0);
        let v = WeightSpec::power_hom(1, -0.5).unwrap();
        assert_relative_eq!(v.box_ess_inf(&[-4.0], &[1.0]), 0.5);
    }

    #[test]
    fn log_integral_of_power() {
        // ∫_0^1 log x^2 = -2
        let w = WeightSpec::power_hom(1, 2.0).unwrap();
        assert_relative_eq!(w.box_log_integral(&[0.0], &[1.0], 1e-10).unwrap(), -2.0, max_relative = 1e-8);
    }
}
