//! Tensor Gauss-Legendre rules, adaptive box integration and integration of
//! functions with a power-type singularity at the origin.

use crate::error::{Error, Result};
use crate::grid::MAX_DIM;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Tensor rule over the box `[lo, hi]`.
    pub fn integrate_box<F: Fn(&[f64]) -> f64 + ?Sized>(&self, dim: usize, lo: &[f64], hi: &[f64], f: &F) -> f64 {
        let k = self.order();
        let mut mid = [0.0; MAX_DIM];
        let mut half = [0.0; MAX_DIM];
        let mut jac = 1.0;
        for d in 0..dim {
            mid[d] = 0.5 * (lo[d] + hi[d]);
            half[d] = 0.5 * (hi[d] - lo[d]);
            jac *= half[d];
        }
        let mut x = [0.0; MAX_DIM];
        let mut acc = 0.0;
        let total = k.pow(dim as u32);
        for code in 0..total {
            let mut c = code;
            let mut w = 1.0;
            for d in (0..dim).rev() {
                let i = c % k;
                c /= k;
                x[d] = mid[d] + half[d] * self.nodes[i];
                w *= self.weights[i];
            }
            acc += w * f(&x[..dim]);
        }
        acc * jac
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive tensor Gauss-Legendre integrator.
#[derive(Debug, Clone)]
pub struct Adaptive {
    low: GaussLegendre,
    high: GaussLegendre,
    pub max_depth: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self::new()
    }
}

impl Adaptive {
    pub fn new() -> Self {
        Self { low: GaussLegendre::new(4), high: GaussLegendre::new(6), max_depth: 10 }
    }

    fn depth_for(&self, dim: usize) -> usize {
        match dim {
            1 => self.max_depth + 10,
            2 => self.max_depth,
            _ => self.max_depth.min(7),
        }
    }

    /// `∫_{[lo,hi]} f` to relative tolerance `tol` (absolute floor `abs_floor`).
    pub fn integrate<F: Fn(&[f64]) -> f64 + ?Sized>(&self, dim: usize, lo: &[f64], hi: &[f64], f: &F, tol: f64) -> f64 {
        let coarse = self.high.integrate_box(dim, lo, hi, f);
        let target = (tol * coarse.abs()).max(f64::MIN_POSITIVE);
        self.recurse(dim, lo, hi, f, coarse, target, self.depth_for(dim))
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(&[f64]) -> f64 + ?Sized>(
        &self,
        dim: usize,
        lo: &[f64],
        hi: &[f64],
        f: &F,
        high: f64,
        target: f64,
        depth: usize,
    ) -> f64 {
        let low = self.low.integrate_box(dim, lo, hi, f);
        if (high - low).abs() <= target || depth == 0 {
            return high;
        }
        let children = 1usize << dim;
        let child_target = target / children as f64;
        let mut acc = 0.0;
        let mut clo = [0.0; MAX_DIM];
        let mut chi = [0.0; MAX_DIM];
        for c in 0..children {
            for d in 0..dim {
                let mid = 0.5 * (lo[d] + hi[d]);
                if (c >> d) & 1 == 0 {
                    clo[d] = lo[d];
                    chi[d] = mid;
                } else {
                    clo[d] = mid;
                    chi[d] = hi[d];
                }
            }
            let h = self.high.integrate_box(dim, &clo[..dim], &chi[..dim], f);
            acc += self.recurse(dim, &clo[..dim], &chi[..dim], f, h, child_target, depth - 1);
        }
        acc
    }

    /// `∫_{[lo,hi]} f` where `f(x) ~ |x|^e` near the origin.
    ///
    /// Boxes not containing the origin are integrated directly. Otherwise the
    /// box is cut into orthant pieces with the origin as a corner, and each
    /// corner cube is summed over dyadic shells with a geometric tail.
    pub fn integrate_singular<F: Fn(&[f64]) -> f64 + ?Sized>(
        &self,
        dim: usize,
        lo: &[f64],
        hi: &[f64],
        f: &F,
        origin_exponent: f64,
        tol: f64,
    ) -> Result<f64> {
        let contains_origin = (0..dim).all(|d| lo[d] <= 0.0 && 0.0 <= hi[d]);
        if !contains_origin {
            return Ok(self.integrate(dim, lo, hi, f, tol));
        }
        if !integrable_at_origin(origin_exponent, dim) {
            return Err(Error::NotLocallyIntegrable(format!("origin exponent {origin_exponent} <= -{dim}")));
        }
        let mut total = 0.0;
        for orthant in 0..(1usize << dim) {
            let mut ext = [0.0; MAX_DIM];
            let mut empty = false;
            for d in 0..dim {
                ext[d] = if (orthant >> d) & 1 == 0 { lo[d] } else { hi[d] };
                if ext[d] == 0.0 {
                    empty = true;
                }
            }
            if empty {
                continue;
            }
            // Cells touching axes twice are counted once since orthants with a
            // zero extent are skipped.
            total += self.corner_box(dim, &ext[..dim], f, origin_exponent, tol)?;
        }
        Ok(total)
    }

    /// Integral over the box spanned by the origin and the signed extents `ext`.
    fn corner_box<F: Fn(&[f64]) -> f64 + ?Sized>(
        &self,
        dim: usize,
        ext: &[f64],
        f: &F,
        origin_exponent: f64,
        tol: f64,
    ) -> Result<f64> {
        let s = ext.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
        let mut total = 0.0;
        // Pieces of the box outside the corner cube [0, s]^n.
        for code in 1..(1usize << dim) {
            let mut lo = [0.0; MAX_DIM];
            let mut hi = [0.0; MAX_DIM];
            let mut empty = false;
            for d in 0..dim {
                let sign = ext[d].signum();
                let (a, b) = if (code >> d) & 1 == 1 { (s, ext[d].abs()) } else { (0.0, s) };
                if b <= a {
                    empty = true;
                }
                let (x, y) = (sign * a, sign * b);
                lo[d] = x.min(y);
                hi[d] = x.max(y);
            }
            if !empty {
                total += self.integrate(dim, &lo[..dim], &hi[..dim], f, tol);
            }
        }
        let mut sign = [0.0; MAX_DIM];
        for d in 0..dim {
            sign[d] = ext[d].signum();
        }
        total += self.corner_cube(dim, &sign[..dim], s, f, origin_exponent, tol)?;
        Ok(total)
    }

    fn corner_cube<F: Fn(&[f64]) -> f64 + ?Sized>(
        &self,
        dim: usize,
        sign: &[f64],
        side: f64,
        f: &F,
        origin_exponent: f64,
        tol: f64,
    ) -> Result<f64> {
        const MAX_SHELLS: usize = 400;
        let expected_ratio = (-(dim as f64 + origin_exponent)).exp2();
        let mut acc = 0.0;
        let mut prev_shell = f64::NAN;
        let mut prev_ratio = f64::NAN;
        let mut outer = side;
        for k in 0..MAX_SHELLS {
            let inner = 0.5 * outer;
            let mut shell = 0.0;
            for code in 1..(1usize << dim) {
                let mut lo = [0.0; MAX_DIM];
                let mut hi = [0.0; MAX_DIM];
                for d in 0..dim {
                    let (a, b) = if (code >> d) & 1 == 1 { (inner, outer) } else { (0.0, inner) };
                    let (x, y) = (sign[d] * a, sign[d] * b);
                    lo[d] = x.min(y);
                    hi[d] = x.max(y);
                }
                shell += self.integrate(dim, &lo[..dim], &hi[..dim], f, tol * 0.1);
            }
            acc += shell;
            let ratio = shell / prev_shell;
            if shell == 0.0 {
                return Ok(acc);
            }
            if k >= 3 && ratio.is_finite() {
                if ratio >= 1.0 && k > 60 {
                    return Err(Error::NotLocallyIntegrable(format!("shell ratio {ratio} does not decay")));
                }
                let settled = (ratio - prev_ratio).abs() <= tol * (1.0 - ratio).abs().max(1e-3)
                    && (ratio - expected_ratio).abs() < 0.05;
                if ratio < 1.0 && (shell.abs() <= tol * acc.abs() || settled) {
                    return Ok(acc + shell * ratio / (1.0 - ratio));
                }
            }
            prev_ratio = ratio;
            prev_shell = shell;
            outer = inner;
        }
        Err(Error::NotLocallyIntegrable(format!(
            "no convergence after {MAX_SHELLS} shells (exponent {origin_exponent})"
        )))
    }
}

/// Whether `|x|^e` is integrable near the origin of `R^dim`. Exponents
/// within rounding of `-dim` count as the borderline case.
pub(crate) fn integrable_at_origin(e: f64, dim: usize) -> bool {
    let n = dim as f64;
    e > -n * (1.0 - 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        for order in 1..12 {
            let rule = GaussLegendre::new(order);
            let total: f64 = rule.weights().iter().sum();
            assert_relative_eq!(total, 2.0, max_relative = 1e-14);
            for deg in 0..(2 * order) {
                let got = rule.integrate_box(1, &[0.0], &[1.0], &|x: &[f64]| x[0].powi(deg as i32));
                assert_relative_eq!(got, 1.0 / (deg as f64 + 1.0), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn adaptive_gaussian_2d() {
        let a = Adaptive::new();
        let got = a.integrate(2, &[-6.0, -6.0], &[6.0, 6.0], &|x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp(), 1e-10);
        assert_relative_eq!(got, std::f64::consts::PI, max_relative = 1e-9);
    }

    #[test]
    fn singular_power_1d_matches_antiderivative() {
        let a = Adaptive::new();
        for &e in &[-0.9, -0.5, 0.5, 1.5] {
            let f = move |x: &[f64]| x[0].abs().powf(e);
            let got = a.integrate_singular(1, &[-0.3], &[1.0], &f, e, 1e-10).unwrap();
            let exact = (0.3f64.powf(e + 1.0) + 1.0) / (e + 1.0);
            assert_relative_eq!(got, exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn singular_power_3d_ball_shell() {
        // ∫_{[-1,1]^3} |x|^{-2}: compare to 8 × octant value by polar-free check
        // using the radial identity ∫_{[0,1]^3} |x|^{-2} = known numeric value.
        let a = Adaptive::new();
        let f = |x: &[f64]| 1.0 / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        let full = a.integrate_singular(3, &[-1.0; 3], &[1.0; 3], &f, -2.0, 1e-8).unwrap();
        let octant = a.integrate_singular(3, &[0.0; 3], &[1.0; 3], &f, -2.0, 1e-8).unwrap();
        assert_relative_eq!(full, 8.0 * octant, max_relative = 1e-7);
        // Scaling: the integral over [0,2]^3 is 2^{3-2} times that over [0,1]^3.
        let big = a.integrate_singular(3, &[0.0; 3], &[2.0; 3], &f, -2.0, 1e-8).unwrap();
        assert_relative_eq!(big, 2.0 * octant, max_relative = 1e-7);
    }

    #[test]
    fn rejects_non_integrable_exponent() {
        let a = Adaptive::new();
        let f = |x: &[f64]| 1.0 / x[0].abs();
        assert!(a.integrate_singular(1, &[-1.0], &[1.0], &f, -1.0, 1e-8).is_err());
    }
}
