//! One function per subcommand; each returns its table and whether a
//! quantity required to be finite diverged.

use hhlab_core::grid::SampleBox;
use hhlab_core::heat::{smoothing_constant_scan, smoothing_sup_scan, HeatConfig};
use hhlab_core::hh_solver::{
    decay_fit, picard_global, picard_local, HHProblem, Mode, Nonlinearity, PicardOutcome, SolverConfig,
};
use hhlab_core::sparse::{default_lambda, domination_ratio, geometric_constant};
use hhlab_core::weights::{
    ap_constant, fujii_wilson, is_ap_closed_form, theorem_constants, ApKind, Corollary, InnerScan, RegionParams,
    RegionQuery, TheoremMode,
};
use hhlab_core::Error;

use crate::config::Params;
use crate::error::CliError;
use crate::inputs::{dim, field, grid, scan, scan_options, weight};
use crate::output::{num, opt_num, Table};

pub struct Run {
    pub table: Table,
    /// Set when the run completed but a required-finite quantity diverged.
    pub divergence: Option<String>,
    /// Failed checks (self-test only).
    pub failures: usize,
}

impl Run {
    fn new(table: Table, divergence: Option<String>) -> Self {
        Self { table, divergence, failures: 0 }
    }
}

fn flag(b: bool) -> String {
    b.to_string()
}

pub fn check_region(p: &mut Params) -> Result<Run, CliError> {
    let corollary: Corollary = p.text("case")?.parse()?;
    let mut params = RegionParams::default();
    for k in ["n", "p", "q", "q1", "tau", "alpha", "beta", "gamma"] {
        if let Some(v) = p.opt_num(k) {
            params.set(k, v)?;
        }
    }
    let report = hhlab_core::weights::check_region(&RegionQuery { corollary, params })?;
    let witness_cols: Vec<String> = report.witness.keys().map(|k| format!("derived_{k}")).collect();
    let mut cols = vec!["admissible", "violated"];
    cols.extend(witness_cols.iter().map(String::as_str));
    let mut t = Table::new(p.echo(), &cols);
    let mut row = vec![flag(report.admissible), report.violated.join("; ")];
    row.extend(report.witness.values().map(|v| num(*v)));
    t.push(row);
    Ok(Run::new(t, None))
}

pub fn weight_constants(p: &mut Params) -> Result<Run, CliError> {
    let n = dim(p)?;
    let w = weight(p, "", n)?;
    let ap_p = p.num("p")?;
    let restrict = SampleBox::new(n, p.num("L")?, 1)?;
    let s = scan(p, &restrict, false)?;
    let opts = scan_options(p)?;
    let ap = ap_constant(&w, ap_p, &s, &opts)?;
    let closed = match p.text("kind")? {
        "power" => Some(is_ap_closed_form(ApKind::Power, p.num("alpha")?, 0.0, ap_p, n)),
        "product" => Some(is_ap_closed_form(ApKind::Product, p.num("alpha")?, p.num("beta")?, ap_p, n)),
        "one" | "constant" => Some(true),
        _ => None,
    };
    let depth = p.count("ainf_depth")?;
    let ainf =
        if depth > 0 { Some(fujii_wilson(&w, &s, &InnerScan::all_shifts(n, depth as u32), &opts)?) } else { None };
    let mut t = Table::new(
        p.echo(),
        &[
            "ap_value",
            "ap_doubled",
            "ap_growth_factor",
            "ap_divergent",
            "ap_closed_form",
            "ainf_value",
            "ainf_divergent",
        ],
    );
    t.push(vec![
        num(ap.value),
        num(ap.doubled_value),
        num(ap.growth_factor),
        flag(ap.divergent),
        closed.map(flag).unwrap_or_default(),
        opt_num(ainf.as_ref().map(|r| r.value)),
        ainf.as_ref().map(|r| flag(r.divergent)).unwrap_or_default(),
    ]);
    let divergence = ap.divergent.then(|| format!("[w]_A_{ap_p} diverges (value {})", ap.value));
    Ok(Run::new(t, divergence))
}

pub fn theorem(p: &mut Params) -> Result<Run, CliError> {
    let n = dim(p)?;
    let sigma = weight(p, "sigma", n)?;
    let v = weight(p, "v", n)?;
    let mode = match p.text("mode")? {
        "local" => TheoremMode::Local { p: p.num("p")?, tau: p.num("tau")?, beta: p.num("beta")? },
        "global" => TheoremMode::Global {
            p: p.num("p")?,
            q: p.num("q")?,
            q1: p.num("q1")?,
            tau: p.num("tau")?,
            alpha: p.num("alpha")?,
        },
        other => return Err(CliError::Config(format!("unknown mode {other:?}"))),
    };
    let restrict = SampleBox::new(n, p.num("L")?, 1)?;
    let s = scan(p, &restrict, false)?;
    let consts = theorem_constants(&sigma, &v, mode, &s, &scan_options(p)?)?;
    let mut t = Table::new(p.echo(), &["constant", "value", "doubled", "growth_factor", "divergent"]);
    let mut bad = Vec::new();
    for (name, c) in &consts {
        if c.divergent {
            bad.push(name.clone());
        }
        t.push(vec![name.clone(), num(c.value), num(c.doubled_value), num(c.growth_factor), flag(c.divergent)]);
    }
    let divergence = (!bad.is_empty()).then(|| format!("divergent: {}", bad.join(", ")));
    Ok(Run::new(t, divergence))
}

fn heat_config(p: &Params) -> Result<HeatConfig, CliError> {
    Ok(HeatConfig::new(p.num("tail_tol")?, p.num("t_min")?, p.num("t_max")?, p.count("t_count")?)?)
}

pub fn domination(p: &mut Params) -> Result<Run, CliError> {
    let g = grid(p)?;
    let f = field(p, &g)?;
    let gamma = p.num("gamma")?;
    let lambda = p.opt_num("lambda").unwrap_or_else(|| default_lambda(g.dim()));
    p.set_derived("lambda", num(lambda));
    let cfg = heat_config(p)?;
    let s = scan(p, &g, true)?;
    let rep = domination_ratio(&f, gamma, &cfg.times(), lambda, &s, cfg.tail_tol)?;
    let geom = if p.flag("geometric") { Some(geometric_constant(&f, gamma, lambda, &s)?.c_geom) } else { None };
    let mut t = Table::new(p.echo(), &["t", "ratio", "max_ratio", "c_geom"]);
    for (time, r) in &rep.per_time {
        t.push(vec![num(*time), num(*r), num(rep.max_ratio), opt_num(geom)]);
    }
    let divergence = (!rep.max_ratio.is_finite()).then(|| "domination ratio is not finite".to_string());
    Ok(Run::new(t, divergence))
}

pub fn smoothing(p: &mut Params) -> Result<Run, CliError> {
    let g = grid(p)?;
    let n = g.dim();
    let f = field(p, &g)?;
    let sigma = weight(p, "sigma", n)?;
    let w = weight(p, "w", n)?;
    let (ep, eq, gamma) = (p.num("p")?, p.num("q")?, p.num("gamma")?);
    let cfg = heat_config(p)?;
    let s = scan(p, &g, true)?;
    let opts = scan_options(p)?;
    let rep = match p.text("form")? {
        "weighted" => smoothing_constant_scan(&f, &sigma, &w, ep, eq, gamma, &cfg, &s, &opts)?,
        "sup" => smoothing_sup_scan(&f, &sigma, ep, eq, gamma, &cfg, &s, &opts)?,
        other => return Err(CliError::Config(format!("unknown form {other:?}"))),
    };
    let mut t = Table::new(p.echo(), &["t", "ratio", "sup_ratio", "bound", "bound_divergent", "c_emp"]);
    for (time, r) in &rep.per_time {
        t.push(vec![
            num(*time),
            num(*r),
            num(rep.sup_ratio),
            num(rep.bound.value),
            flag(rep.bound.divergent),
            num(rep.c_emp()),
        ]);
    }
    let divergence = rep.bound.divergent.then(|| format!("two-weight bound diverges (value {})", rep.bound.value));
    Ok(Run::new(t, divergence))
}

fn solver_setup(p: &mut Params, mode: Mode) -> Result<(HHProblem, SolverConfig), CliError> {
    let g = grid(p)?;
    let n = g.dim();
    let nonlinearity = match p.text("nonlinearity")? {
        "signed_power" => Nonlinearity::SignedPower,
        "power" => Nonlinearity::Power,
        other => return Err(CliError::Config(format!("unknown nonlinearity {other:?}"))),
    };
    let prob = HHProblem {
        p: p.num("p")?,
        tau: p.num("tau")?,
        sigma: weight(p, "sigma", n)?,
        v: weight(p, "v", n)?,
        u0: field(p, &g)?,
        nonlinearity,
        mode,
    };
    let mut cfg = SolverConfig {
        steps: p.count("steps")?,
        tol_fp: p.num("tol_fp")?,
        max_iter: p.count("max_iter")?,
        tail_tol: p.num("tail_tol")?,
        coarse_tol: p.num("coarse_tol")?,
        ..SolverConfig::default()
    };
    cfg.scan_opts.growth_threshold = p.num("growth")?;
    if p.flag("check") || matches!(mode, Mode::Global { .. }) {
        let restrict = SampleBox::new(n, p.num("scan_L")?, 1)?;
        cfg.scan = Some(scan(p, &restrict, false)?);
    }
    Ok((prob, cfg))
}

const TRAJECTORY_COLS: [&str; 8] =
    ["t", "sup_norm", "norm_xp", "norm_xinf", "rho", "converged", "iterations", "residual"];

fn trajectory_rows(t: &mut Table, o: &PicardOutcome, extra: &[String]) {
    let tr = &o.trajectory;
    for i in 0..tr.len() {
        let mut row = vec![
            num(tr.times[i]),
            num(tr.fields[i].max_abs()),
            num(tr.norm_xp[i]),
            num(tr.norm_xinf[i]),
            num(o.rho),
            flag(o.converged),
            o.iterations.to_string(),
            num(tr.residual),
        ];
        row.extend_from_slice(extra);
        t.push(row);
    }
}

pub fn solve_local(p: &mut Params) -> Result<Run, CliError> {
    let mut horizon = p.num("T")?;
    let beta = p.num("beta")?;
    let halvings = p.count("halvings")?;
    let (mut prob, cfg) = solver_setup(p, Mode::Local { t_final: horizon, beta })?;
    let mut attempt = 0;
    let report = loop {
        prob.mode = Mode::Local { t_final: horizon, beta };
        match picard_local(&prob, &cfg) {
            Err(Error::NoContraction { .. }) if attempt < halvings => {
                attempt += 1;
                horizon *= 0.5;
            }
            other => break other?,
        }
    };
    let mut cols = TRAJECTORY_COLS.to_vec();
    cols.extend(["T_used", "W", "W_divergent"]);
    let mut t = Table::new(p.echo(), &cols);
    let w = report.w_constant.as_ref();
    let extra = [num(horizon), opt_num(w.map(|c| c.value)), w.map(|c| flag(c.divergent)).unwrap_or_default()];
    trajectory_rows(&mut t, &report.outcome, &extra);
    let divergence = match (report.outcome.converged, w) {
        (false, _) => Some(format!("no convergence in {} iterations", report.outcome.iterations)),
        (_, Some(c)) if c.divergent => Some(format!("W diverges (value {})", c.value)),
        _ => None,
    };
    Ok(Run::new(t, divergence))
}

pub fn solve_global(p: &mut Params) -> Result<Run, CliError> {
    let t_max = p.num("t_max")?;
    let mode = Mode::Global { q: p.num("q")?, q1: p.num("q1")?, alpha: p.num("alpha")? };
    let (prob, cfg) = solver_setup(p, mode)?;
    let rep = picard_global(&prob, t_max, &cfg)?;
    let lo = p.opt_num("decay_lo").unwrap_or(0.1 * t_max);
    let hi = p.opt_num("decay_hi").unwrap_or(t_max);
    p.set_derived("decay_lo", num(lo));
    p.set_derived("decay_hi", num(hi));
    let fit = match decay_fit(&rep.outcome.trajectory, (lo, hi)) {
        Ok(f) => Some(f),
        Err(Error::TooFewSamples { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut cols = TRAJECTORY_COLS.to_vec();
    cols.extend(["u0_norm", "radius", "margin", "decay_constant", "W1", "W2", "W3", "decay_slope", "decay_r2"]);
    let mut t = Table::new(p.echo(), &cols);
    let c = |k: &str| opt_num(rep.constants.get(k).map(|r| r.value));
    let extra = [
        num(rep.u0_norm),
        num(rep.smallness_radius),
        num(rep.margin),
        num(rep.decay_constant),
        c("W1"),
        c("W2"),
        c("W3"),
        opt_num(fit.map(|f| f.0)),
        opt_num(fit.map(|f| f.1)),
    ];
    trajectory_rows(&mut t, &rep.outcome, &extra);
    let divergence =
        (!rep.outcome.converged).then(|| format!("no convergence in {} iterations", rep.outcome.iterations));
    Ok(Run::new(t, divergence))
}
