//! Mild solutions of `u_t - Δu = V N(u)` by Picard iteration on the Duhamel
//! map `Φ[u](t) = e^{tΔ}u₀ + ∫₀ᵗ e^{(t-s)Δ} V N(u(s)) ds`.
//!
//! Time grid: `t_i = i Δt`, `i = 0..=M`. The linear part follows
//! `L_{i+1} = H L_i` and the Duhamel part the trapezoid recurrence
//! `D_{i+1} = H (D_i + Δt/2 U_i) + Δt/2 U_{i+1}`, with `H = e^{ΔtΔ}` and
//! `U_i = V N(u_i)`. `V` enters through its cell averages.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grid::{CubeScan, SampleBox, SampledField};
use crate::heat::{CellWeights, HeatKernel};
use crate::weights::{ap_constant, theorem_constants, ConstantReport, ScanOptions, TheoremMode, WeightSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Nonlinearity {
    /// `u^τ`; negative values are rejected unless `τ` is an integer.
    Power,
    /// `|u|^{τ-1} u`.
    #[default]
    SignedPower,
}

impl Nonlinearity {
    fn eval(self, u: f64, tau: f64) -> f64 {
        match self {
            Nonlinearity::Power => u.powf(tau),
            Nonlinearity::SignedPower => u.abs().powf(tau).copysign(u),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Local { t_final: f64, beta: f64 },
    Global { q: f64, q1: f64, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HHProblem {
    pub p: f64,
    pub tau: f64,
    pub sigma: WeightSpec,
    pub v: WeightSpec,
    pub u0: SampledField,
    pub nonlinearity: Nonlinearity,
    pub mode: Mode,
}

fn hypothesis(cond: bool, name: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::HypothesisFailed(name.to_string()))
    }
}

impl HHProblem {
    pub fn dim(&self) -> usize {
        self.u0.grid().dim()
    }

    /// Exponent of `t` in the `X_∞` norm: `(α + n/q)/2` globally, 0 locally.
    pub fn xinf_exponent(&self) -> f64 {
        match self.mode {
            Mode::Global { q, alpha, .. } => 0.5 * (alpha + self.dim() as f64 / q),
            Mode::Local { .. } => 0.0,
        }
    }

    pub fn horizon(&self) -> Option<f64> {
        match self.mode {
            Mode::Local { t_final, .. } => Some(t_final),
            Mode::Global { .. } => None,
        }
    }

    /// Exponent hypotheses of the local or global existence theorem.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim() as f64;
        let (p, tau) = (self.p, self.tau);
        if self.sigma.dim() != self.dim() || self.v.dim() != self.dim() {
            return Err(Error::InvalidParameter("weights and data dimensions differ".into()));
        }
        match self.mode {
            Mode::Local { t_final, beta } => {
                hypothesis(t_final > 0.0 && t_final.is_finite(), "T > 0")?;
                hypothesis(p > 1.0, "1 < p")?;
                hypothesis(tau >= 1.0 && tau < p.min(1.0 + 2.0 * p / n), "1 <= tau < min(p, 1+2p/n)")?;
                hypothesis(n * (tau - 1.0) / p <= beta, "n(tau-1)/p <= beta")?;
                hypothesis(beta <= n * (1.0 - 1.0 / p), "beta <= n(1-1/p)")?;
                hypothesis(beta < 2.0, "beta < 2")?;
            }
            Mode::Global { q, q1, alpha } => {
                hypothesis(p > 1f64.max(n / 2.0) && p.is_finite(), "max(1, n/2) < p")?;
                hypothesis(tau > 2.0 && tau < 1.0 + 2.0 * p / n, "2 < tau < 1+2p/n")?;
                hypothesis(p <= q && q.is_finite() && p <= q1 && q1.is_finite(), "p <= q, q1 < inf")?;
                hypothesis(n * (1.0 / p - 1.0 / q) <= alpha, "n(1/p-1/q) <= alpha")?;
                hypothesis(alpha <= n.min(2.0 / (tau - 1.0) - n / q), "alpha <= min(n, 2/(tau-1)-n/q)")?;
                hypothesis(
                    2.0 - n * (1.0 + 1.0 / q1) < (alpha + n / q) * (tau - 2.0),
                    "2-n(1+1/q1) < (alpha+n/q)(tau-2)",
                )?;
            }
        }
        if self.nonlinearity == Nonlinearity::Power && tau.fract() != 0.0 && self.u0.values().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter("u^tau with negative data needs integer tau".into()));
        }
        Ok(())
    }
}

/// Iteration and discretisation controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Number of time steps `M`.
    pub steps: usize,
    pub tol_fp: f64,
    pub max_iter: usize,
    pub tail_tol: f64,
    /// Bound on the first-order step indicator before `GridTooCoarse`.
    pub coarse_tol: f64,
    pub weight_tol: f64,
    /// Cubes for hypothesis checks and theorem constants; `None` skips
    /// the checks (not allowed for global runs with nonzero `V`).
    pub scan: Option<CubeScan>,
    pub scan_opts: ScanOptions,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            steps: 32,
            tol_fp: 1e-10,
            max_iter: 60,
            tail_tol: 1e-12,
            coarse_tol: 1e-2,
            weight_tol: 1e-9,
            scan: None,
            scan_opts: ScanOptions::default(),
        }
    }
}

/// Solution samples on the time grid with running norms.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<SampledField>,
    /// `sup_{s <= t_i} ‖u(s)‖_{L^p(σ)}`.
    pub norm_xp: Vec<f64>,
    /// `sup_{s <= t_i} s^e ‖u(s)‖_∞` with `e` the problem's `X_∞` exponent.
    pub norm_xinf: Vec<f64>,
    pub residual: f64,
}

impl Trajectory {
    pub fn norm_x(&self) -> f64 {
        self.norm_xp.last().copied().unwrap_or(0.0) + self.norm_xinf.last().copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

struct Setup {
    grid: SampleBox,
    times: Vec<f64>,
    dt: f64,
    kernel: HeatKernel,
    v: Vec<f64>,
    v_zero: bool,
    sigma: CellWeights,
    p: f64,
    tau: f64,
    nl: Nonlinearity,
    xinf_exp: f64,
}

impl Setup {
    fn new(prob: &HHProblem, horizon: f64, cfg: &SolverConfig) -> Result<Self> {
        if cfg.steps == 0 {
            return Err(Error::InvalidParameter("need at least one time step".into()));
        }
        let grid = *prob.u0.grid();
        let dt = horizon / cfg.steps as f64;
        let times = (0..=cfg.steps).map(|i| i as f64 * dt).collect();
        let kernel = HeatKernel::new(&grid, dt, cfg.tail_tol)?;
        let cell = grid.cell_volume();
        let v: Vec<f64> = prob.v.grid_integrals(&grid, cfg.weight_tol)?.into_iter().map(|x| x / cell).collect();
        let v_zero = v.iter().all(|&x| x == 0.0);
        let sigma = CellWeights::new(&grid, &prob.sigma, cfg.weight_tol)?;
        Ok(Self {
            grid,
            times,
            dt,
            kernel,
            v,
            v_zero,
            sigma,
            p: prob.p,
            tau: prob.tau,
            nl: prob.nonlinearity,
            xinf_exp: prob.xinf_exponent(),
        })
    }

    fn heat(&self, x: &[f64]) -> Result<Vec<f64>> {
        let f = SampledField::new(self.grid, x.to_vec())?;
        Ok(self.kernel.apply(&f)?.into_values())
    }

    fn linear(&self, u0: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(self.times.len());
        out.push(u0.to_vec());
        for i in 1..self.times.len() {
            let next = self.heat(&out[i - 1])?;
            out.push(next);
        }
        Ok(out)
    }

    fn source(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.v).map(|(x, v)| v * self.nl.eval(*x, self.tau)).collect()
    }

    /// Duhamel part `D_i` and the step indicator
    /// `Δt/2 max_i ‖U_{i+1} - U_i‖_∞ / max_i ‖u_i‖_∞`.
    fn duhamel(&self, u: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, f64)> {
        let cells = self.grid.cell_count();
        let mut d = Vec::with_capacity(u.len());
        d.push(vec![0.0; cells]);
        if self.v_zero {
            d.resize(u.len(), vec![0.0; cells]);
            return Ok((d, 0.0));
        }
        let half = 0.5 * self.dt;
        let mut prev = self.source(&u[0]);
        let mut jump: f64 = 0.0;
        for i in 1..u.len() {
            let cur = self.source(&u[i]);
            let mixed: Vec<f64> = d[i - 1].iter().zip(&prev).map(|(a, b)| a + half * b).collect();
            let mut next = self.heat(&mixed)?;
            for (x, c) in next.iter_mut().zip(&cur) {
                *x += half * c;
            }
            jump = jump.max(cur.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            d.push(next);
            prev = cur;
        }
        let scale = u.iter().map(|x| sup(x)).fold(0.0, f64::max);
        let indicator = if scale > 0.0 { half * jump / scale } else { 0.0 };
        Ok((d, indicator))
    }

    fn map(&self, lin: &[Vec<f64>], u: &[Vec<f64>], coarse_tol: f64) -> Result<Vec<Vec<f64>>> {
        let (d, indicator) = self.duhamel(u)?;
        if indicator > coarse_tol {
            let need = ((self.times.len() - 1) as f64 * indicator / coarse_tol).ceil();
            return Err(Error::GridTooCoarse(format!(
                "step indicator {indicator:.3e} exceeds {coarse_tol:.1e}; use at least {need} steps"
            )));
        }
        let mut d = d;
        for (di, l) in d.iter_mut().zip(lin) {
            for (x, a) in di.iter_mut().zip(l) {
                *x += a;
            }
        }
        Ok(d)
    }

    /// `(sup_i ‖x_i‖_{L^p(σ)}, sup_i t_i^e ‖x_i‖_∞)`.
    fn norms(&self, x: &[Vec<f64>]) -> Result<(f64, f64)> {
        let mut a: f64 = 0.0;
        let mut b: f64 = 0.0;
        for (t, xi) in self.times.iter().zip(x) {
            a = a.max(self.sigma.norm_values(xi, self.p)?);
            b = b.max(t.powf(self.xinf_exp) * sup(xi));
        }
        Ok((a, b))
    }

    fn diff_norm(&self, x: &[Vec<f64>], y: &[Vec<f64>], with_xinf: bool) -> Result<f64> {
        let mut a: f64 = 0.0;
        let mut b: f64 = 0.0;
        let mut buf = vec![0.0; self.grid.cell_count()];
        for ((t, xi), yi) in self.times.iter().zip(x).zip(y) {
            for ((o, p), q) in buf.iter_mut().zip(xi).zip(yi) {
                *o = p - q;
            }
            a = a.max(self.sigma.norm_values(&buf, self.p)?);
            b = b.max(t.powf(self.xinf_exp) * sup(&buf));
        }
        Ok(if with_xinf { a + b } else { a })
    }

    fn trajectory(&self, u: Vec<Vec<f64>>, residual: f64) -> Result<Trajectory> {
        let mut norm_xp = Vec::with_capacity(u.len());
        let mut norm_xinf = Vec::with_capacity(u.len());
        let (mut a, mut b): (f64, f64) = (0.0, 0.0);
        for (t, x) in self.times.iter().zip(&u) {
            a = a.max(self.sigma.norm_values(x, self.p)?);
            b = b.max(t.powf(self.xinf_exp) * sup(x));
            norm_xp.push(a);
            norm_xinf.push(b);
        }
        let fields = u.into_iter().map(|x| SampledField::new(self.grid, x)).collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { times: self.times.clone(), fields, norm_xp, norm_xinf, residual })
    }
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Outcome of a Picard run.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    /// Last ratio of successive iterate differences.
    pub rho: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Iterate differences in the iteration norm.
    pub diffs: Vec<f64>,
}

fn iterate(setup: &Setup, u0: &[f64], cfg: &SolverConfig, with_xinf: bool) -> Result<PicardOutcome> {
    let lin = setup.linear(u0)?;
    let mut u = lin.clone();
    let mut diffs = Vec::new();
    let mut rho = 0.0;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let next = setup.map(&lin, &u, cfg.coarse_tol)?;
        let diff = setup.diff_norm(&next, &u, with_xinf)?;
        let (a, b) = setup.norms(&next)?;
        let size = if with_xinf { a + b } else { a };
        if !diff.is_finite() || !size.is_finite() {
            return Err(Error::NoContraction { rho: f64::INFINITY });
        }
        if let Some(&prev) = diffs.last() {
            rho = if diff == 0.0 { 0.0 } else { diff / prev };
        }
        diffs.push(diff);
        u = next;
        if diff < cfg.tol_fp * size.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged && rho >= 1.0 {
        return Err(Error::NoContraction { rho });
    }
    let check = setup.map(&lin, &u, f64::INFINITY)?;
    let (xp, _) = setup.norms(&u)?;
    let defect = setup.diff_norm(&check, &u, false)? / xp.max(1.0);
    let iterations = diffs.len();
    Ok(PicardOutcome { trajectory: setup.trajectory(u, defect)?, rho, converged, iterations, diffs })
}

fn scan_for<'a>(cfg: &'a SolverConfig, what: &str) -> Result<&'a CubeScan> {
    cfg.scan.as_ref().ok_or_else(|| Error::MissingParameter(format!("scan for {what}")))
}

fn check_ap(w: &WeightSpec, p: f64, scan: &CubeScan, opts: &ScanOptions, name: &str) -> Result<()> {
    let r = ap_constant(w, p, scan, opts)?;
    if r.divergent {
        return Err(Error::HypothesisFailed(format!("{name}: A_p constant {} diverges", r.value)));
    }
    Ok(())
}

/// Local run with its theorem constant.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalReport {
    pub outcome: PicardOutcome,
    /// `W` from the local theorem, when a scan was supplied and `V ≠ 0`.
    pub w_constant: Option<ConstantReport>,
}

/// Picard iteration for the local theorem on `[0, T]`, starting from the
/// free flow `e^{tΔ}u₀`.
pub fn picard_local(prob: &HHProblem, cfg: &SolverConfig) -> Result<LocalReport> {
    prob.validate()?;
    let (t_final, beta) = match prob.mode {
        Mode::Local { t_final, beta } => (t_final, beta),
        Mode::Global { .. } => return Err(Error::InvalidParameter("problem is in global mode".into())),
    };
    let setup = Setup::new(prob, t_final, cfg)?;
    let mut w_constant = None;
    if let Some(scan) = &cfg.scan {
        check_ap(&prob.sigma, prob.p, scan, &cfg.scan_opts, "sigma in A_p")?;
        if !setup.v_zero {
            let r = prob.p / prob.tau;
            let w = prob.sigma.mul(&prob.v.pow(-r))?;
            if r > 1.0 {
                check_ap(&w, r, scan, &cfg.scan_opts, "sigma V^{-p/tau} in A_{p/tau}")?;
            }
            let mode = TheoremMode::Local { p: prob.p, tau: prob.tau, beta };
            let mut c = theorem_constants(&prob.sigma, &prob.v, mode, scan, &cfg.scan_opts)?;
            w_constant = c.remove("W");
        }
    }
    let outcome = iterate(&setup, prob.u0.values(), cfg, false)?;
    Ok(LocalReport { outcome, w_constant })
}

/// Global run with the smallness data actually used.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalReport {
    pub outcome: PicardOutcome,
    pub constants: BTreeMap<String, ConstantReport>,
    /// Largest admissible `‖u₀‖_{L^p(σ)}` (after the safety factor).
    pub smallness_radius: f64,
    pub u0_norm: f64,
    /// `‖u₀‖ / smallness_radius`.
    pub margin: f64,
    /// `sup_t t^{(α+n/q)/2} ‖u(t)‖_∞ / ‖u₀‖_{L^p(σ)}`.
    pub decay_constant: f64,
}

/// Safety factor applied to the contraction radius.
pub const SMALLNESS_SAFETY: f64 = 0.5;

/// `‖u₀‖` bound from `‖Φ[u]‖_X <= C_lin ‖u₀‖ + C_nl ‖u‖_X^τ` with
/// `C_lin = 1 + W2`, `C_nl = W1 + W3`: the ball of radius
/// `R = ½ (2 C_nl)^{-1/(τ-1)}` is mapped into itself and contracted when
/// `‖u₀‖ <= R / (2 C_lin)`; the safety factor is then applied.
pub fn smallness_radius(w1: f64, w2: f64, w3: f64, tau: f64) -> f64 {
    let c_lin = 1.0 + w2;
    let c_nl = w1 + w3;
    let r = if c_nl > 0.0 { 0.5 * (2.0 * c_nl).powf(-1.0 / (tau - 1.0)) } else { f64::INFINITY };
    SMALLNESS_SAFETY * r / (2.0 * c_lin)
}

/// Picard iteration for the global theorem on `[0, t_max]` in the
/// `X = X_p + X_∞` norm.
pub fn picard_global(prob: &HHProblem, t_max: f64, cfg: &SolverConfig) -> Result<GlobalReport> {
    prob.validate()?;
    let (q, q1, alpha) = match prob.mode {
        Mode::Global { q, q1, alpha } => (q, q1, alpha),
        Mode::Local { .. } => return Err(Error::InvalidParameter("problem is in local mode".into())),
    };
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("need t_max > 0, got {t_max}")));
    }
    let setup = Setup::new(prob, t_max, cfg)?;
    let u0_norm = setup.sigma.norm_values(prob.u0.values(), prob.p)?;
    let mut constants = BTreeMap::new();
    let mut radius = f64::INFINITY;
    if !setup.v_zero {
        let scan = scan_for(cfg, "global constants")?;
        check_ap(&prob.sigma, prob.p, scan, &cfg.scan_opts, "sigma in A_p")?;
        let w = prob.sigma.mul(&prob.v.pow(-prob.p))?;
        check_ap(&w, prob.p, scan, &cfg.scan_opts, "sigma V^{-p} in A_p")?;
        let mode = TheoremMode::Global { p: prob.p, q, q1, tau: prob.tau, alpha };
        constants = theorem_constants(&prob.sigma, &prob.v, mode, scan, &cfg.scan_opts)?;
        for (name, c) in &constants {
            if c.divergent || !c.value.is_finite() {
                return Err(Error::DivergentConstant(format!("{name} = {}", c.value)));
            }
        }
        radius = smallness_radius(constants["W1"].value, constants["W2"].value, constants["W3"].value, prob.tau);
        if u0_norm > radius {
            return Err(Error::SmallnessViolated { norm: u0_norm, max_norm: radius });
        }
    } else if let Some(scan) = &cfg.scan {
        check_ap(&prob.sigma, prob.p, scan, &cfg.scan_opts, "sigma in A_p")?;
    }
    let outcome = iterate(&setup, prob.u0.values(), cfg, true)?;
    let decay_constant =
        if u0_norm > 0.0 { outcome.trajectory.norm_xinf.last().copied().unwrap_or(0.0) / u0_norm } else { 0.0 };
    let margin = if radius.is_finite() { u0_norm / radius } else { 0.0 };
    Ok(GlobalReport { outcome, constants, smallness_radius: radius, u0_norm, margin, decay_constant })
}

fn grid_index(u: &Trajectory, t: f64) -> Result<usize> {
    u.times
        .iter()
        .position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
        .ok_or_else(|| Error::InvalidParameter(format!("t = {t} is not a grid time")))
}

fn setup_for(u: &Trajectory, prob: &HHProblem, cfg: &SolverConfig) -> Result<Setup> {
    if u.times.len() < 2 {
        return Err(Error::InvalidParameter("trajectory needs at least two times".into()));
    }
    let horizon = *u.times.last().unwrap();
    let mut c = cfg.clone();
    c.steps = u.times.len() - 1;
    Setup::new(prob, horizon, &c)
}

/// `D[u](t) = ∫₀ᵗ e^{(t-s)Δ} V N(u(s)) ds` at a grid time `t`.
pub fn duhamel_apply(u: &Trajectory, prob: &HHProblem, t: f64, cfg: &SolverConfig) -> Result<SampledField> {
    let setup = setup_for(u, prob, cfg)?;
    let i = grid_index(u, t)?;
    let vals: Vec<Vec<f64>> = u.fields.iter().map(|f| f.values().to_vec()).collect();
    let (mut d, _) = setup.duhamel(&vals)?;
    SampledField::new(setup.grid, d.swap_remove(i))
}

/// `sup_i ‖u_i - e^{t_iΔ}u₀ - D[u](t_i)‖_{L^p(σ)} / max(1, ‖u‖_{X_p})`.
pub fn residual(u: &Trajectory, prob: &HHProblem, cfg: &SolverConfig) -> Result<f64> {
    let setup = setup_for(u, prob, cfg)?;
    let vals: Vec<Vec<f64>> = u.fields.iter().map(|f| f.values().to_vec()).collect();
    let lin = setup.linear(prob.u0.values())?;
    let phi = setup.map(&lin, &vals, f64::INFINITY)?;
    let (xp, _) = setup.norms(&vals)?;
    Ok(setup.diff_norm(&phi, &vals, false)? / xp.max(1.0))
}

/// Least-squares slope of `log ‖u(t)‖_∞` against `log t` on the window,
/// with its coefficient of determination.
pub fn decay_fit(u: &Trajectory, window: (f64, f64)) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = u
        .times
        .iter()
        .zip(&u.fields)
        .filter(|(t, _)| **t > 0.0 && **t >= window.0 && **t <= window.1)
        .map(|(t, f)| (t.ln(), f.max_abs().ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::TooFewSamples { need: 8, got: pts.len() });
    }
    let m = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
    let (sxx, sxy, syy) = pts.iter().fold((0.0, 0.0, 0.0), |(a, b, c), (x, y)| {
        let (dx, dy) = (x - mx, y - my);
        (a + dx * dx, b + dx * dy, c + dy * dy)
    });
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok((slope, r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(grid: &SampleBox, amp: f64) -> SampledField {
        SampledField::from_fn(*grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            amp * (-4.0 * r2).exp()
        })
        .unwrap()
    }

    fn local(v: WeightSpec, tau: f64, u0: SampledField, t_final: f64) -> HHProblem {
        let n = u0.grid().dim();
        HHProblem {
            p: 3.0,
            tau,
            sigma: WeightSpec::one(n).unwrap(),
            v,
            u0,
            nonlinearity: Nonlinearity::SignedPower,
            mode: Mode::Local { t_final, beta: 0.5 },
        }
    }

    #[test]
    fn zero_potential_is_the_free_flow() {
        let g = SampleBox::new(1, 8.0, 256).unwrap();
        let u0 = bump(&g, 1.0);
        let prob = local(WeightSpec::constant(1, 0.0).unwrap(), 2.0, u0.clone(), 1.0);
        let cfg = SolverConfig { steps: 8, ..SolverConfig::default() };
        let r = picard_local(&prob, &cfg).unwrap();
        assert!(r.outcome.converged);
        assert_eq!(r.outcome.iterations, 1);
        assert!(r.outcome.trajectory.residual <= 1e-14);
        assert_eq!(r.outcome.trajectory.fields[0], u0);
    }

    #[test]
    fn constant_potential_linear_case() {
        let g = SampleBox::new(1, 8.0, 256).unwrap();
        let u0 = bump(&g, 1.0);
        let c = 0.2;
        let mut prob = local(WeightSpec::constant(1, c).unwrap(), 1.0, u0, 0.5);
        prob.mode = Mode::Local { t_final: 0.5, beta: 0.0 };
        let cfg = SolverConfig { steps: 16, ..SolverConfig::default() };
        let r = picard_local(&prob, &cfg).unwrap();
        assert!(r.outcome.converged && r.outcome.rho < 1.0);
        let tr = &r.outcome.trajectory;
        let k = HeatKernel::new(&g, 0.5 / 16.0, cfg.tail_tol).unwrap();
        let mut free = prob.u0.clone();
        for (i, f) in tr.fields.iter().enumerate() {
            let scale = (c * tr.times[i]).exp();
            let err = f.values().iter().zip(free.values()).map(|(a, b)| (a - scale * b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-6, "step {i}: {err}");
            free = k.apply(&free).unwrap();
        }
    }

    #[test]
    fn exponent_hypotheses() {
        let g = SampleBox::new(1, 4.0, 64).unwrap();
        let prob = local(WeightSpec::one(1).unwrap(), 3.5, bump(&g, 1.0), 1.0);
        assert!(matches!(prob.validate(), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn decay_fit_on_power_law() {
        let g = SampleBox::new(1, 4.0, 16).unwrap();
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let fields: Vec<SampledField> =
            times.iter().map(|&t| SampledField::constant(g, if t > 0.0 { t.powf(-0.7) } else { 1.0 })).collect();
        let tr = Trajectory { times, fields, norm_xp: vec![], norm_xinf: vec![], residual: 0.0 };
        let (s, r2) = decay_fit(&tr, (1.0, 10.0)).unwrap();
        assert!((s + 0.7).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        assert!(matches!(decay_fit(&tr, (1.0, 2.0)), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn smallness_radius_shape() {
        let r = smallness_radius(1.0, 0.0, 1.0, 2.0);
        // R = ½ · 4^{-1} = 1/8, radius = ½ · R / 2.
        assert!((r - 1.0 / 32.0).abs() < 1e-15);
    }
}
