//! Built-in trivial cases of every module, each reduced to a pass flag and
//! the measured quantity.

use std::f64::consts::PI;

use hhlab_core::grid::{cube_average, CubeScan, DyadicCube, SampleBox, SampledField};
use hhlab_core::heat::{
    heat_apply, smoothing_constant_scan, smoothing_sup_scan, weighted_norm, HeatConfig, HeatKernel,
};
use hhlab_core::hh_solver::{
    decay_fit, duhamel_apply, picard_global, picard_local, residual, HHProblem, Mode, Nonlinearity, SolverConfig,
    Trajectory,
};
use hhlab_core::sparse::{
    build_sparse, domination_ratio, dyadic_maximal, fractional_integral, fractional_maximal, sparse_apply,
    SparseFamily, StoppingCube,
};
use hhlab_core::weights::{
    ap_constant, ball_norm_oracle, fujii_wilson, is_ap_closed_form, morrey_norm, theorem_constants,
    two_weight_constant, weight_integral, ApKind, BallEnvelope, InnerScan, ScanOptions, TheoremMode, WeightSpec,
};
use hhlab_core::{Error, Result};

type Outcome = Result<(bool, f64)>;

fn box1(l: f64, n: usize) -> SampleBox {
    SampleBox::new(1, l, n).unwrap()
}

fn indicator(g: &SampleBox, lo: f64, hi: f64) -> SampledField {
    SampledField::from_fn(*g, |x| if (lo..hi).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> (bool, f64) {
    ((a - b).abs() <= tol, a)
}

fn sup_diff(a: &SampledField, b: &SampledField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn grid_constant_average() -> Outcome {
    let g = SampleBox::new(2, 2.0, 16)?;
    let q = DyadicCube::new(2, &[0, 0], 0, &[0, 0])?;
    Ok(close(cube_average(&SampledField::constant(g, 7.0), &q)?, 7.0, 1e-14))
}

fn grid_affine_midpoint() -> Outcome {
    let g = box1(1.0, 64);
    let f = SampledField::from_fn(g, |x| x[0])?;
    let q = DyadicCube::new(1, &[0], 0, &[0])?;
    Ok(close(cube_average(&f, &q)?, 0.5, 1e-14))
}

fn grid_indicator_average() -> Outcome {
    let g = box1(1.0, 64);
    let q = DyadicCube::new(1, &[0], 0, &[0])?;
    Ok(close(cube_average(&indicator(&g, 0.0, 0.5), &q)?, 0.5, 1e-14))
}

fn grid_aligned_cover() -> Outcome {
    let (q, ratio) = hhlab_core::grid::shifted_cover(&[0.0, 0.0], &[1.0, 1.0])?;
    Ok((ratio == 1.0 && q.lower(0) == 0.0 && q.upper(1) == 1.0, ratio))
}

fn grid_level_zero_cubes() -> Outcome {
    let s = CubeScan::standard(0, 0, box1(1.0, 4))?;
    let cubes = s.enumerate()?;
    let ok = cubes.len() == 2 && cubes.iter().any(|q| q.lower(0) == -1.0) && cubes.iter().any(|q| q.lower(0) == 0.0);
    Ok((ok, cubes.len() as f64))
}

fn grid_two_levels() -> Outcome {
    let n = CubeScan::standard(0, 1, box1(1.0, 4))?.enumerate()?.len();
    Ok((n == 6, n as f64))
}

fn grid_empty_levels() -> Outcome {
    Ok((CubeScan::standard(1, 0, box1(1.0, 4)).is_err(), 0.0))
}

fn weights_lebesgue() -> Outcome {
    let q = DyadicCube::new(2, &[0, 0], 0, &[0, 0])?;
    Ok(close(weight_integral(&WeightSpec::power_hom(2, 0.0)?, &q, 1e-10)?, 1.0, 1e-12))
}

fn weights_linear() -> Outcome {
    let q = DyadicCube::new(1, &[0], 0, &[0])?;
    Ok(close(weight_integral(&WeightSpec::power_hom(1, 1.0)?, &q, 1e-10)?, 0.5, 1e-9))
}

fn unit_scan() -> Result<CubeScan> {
    CubeScan::all_shifts(-2, 3, box1(2.0, 8))
}

fn weights_a2_of_one() -> Outcome {
    let r = ap_constant(&WeightSpec::one(1)?, 2.0, &unit_scan()?, &ScanOptions::default())?;
    Ok(((r.value - 1.0).abs() <= 1e-12 && !r.divergent, r.value))
}

fn weights_ainf_of_one() -> Outcome {
    let r = fujii_wilson(&WeightSpec::one(1)?, &unit_scan()?, &InnerScan::all_shifts(1, 4), &ScanOptions::default())?;
    Ok((r.value >= 1.0 - 1e-12 && r.value <= 1.0 + 1e-9, r.value))
}

fn weights_two_weight_of_ones() -> Outcome {
    let (p, q) = (2.0, 4.0);
    let one = WeightSpec::one(1)?;
    let r = two_weight_constant(&one, &one, p, q, 1.0 / p - 1.0 / q, &unit_scan()?, &ScanOptions::default())?;
    Ok(close(r.value, 1.0, 1e-12))
}

fn weights_morrey_of_one() -> Outcome {
    let p = 2.0;
    let s = unit_scan()?;
    let r = morrey_norm(&WeightSpec::one(1)?, p, p, &s, &ScanOptions::default())?;
    let top = (-s.level_min as f64).exp2();
    Ok(((r.value - top.powf(1.0 / p)).abs() <= 1e-12 * r.value && r.divergent, r.value))
}

fn weights_ball_lebesgue() -> Outcome {
    let env = BallEnvelope::default();
    let (lo1, hi1, _) = ball_norm_oracle(2, 0.0, 0.0, 0.3, 1.0, &env)?;
    let (lo2, hi2, _) = ball_norm_oracle(2, 0.0, 0.0, 0.3, 2.0, &env)?;
    let ok = ((lo2 / lo1) - 4.0).abs() < 1e-12 && ((hi2 / hi1) - 4.0).abs() < 1e-12;
    Ok((ok, lo2 / lo1))
}

fn weights_power_zero_in_ap() -> Outcome {
    Ok(([1.5, 2.0, 7.0].iter().all(|&p| is_ap_closed_form(ApKind::Power, 0.0, 0.0, p, 3)), 0.0))
}

fn weights_product_in_a2() -> Outcome {
    Ok((is_ap_closed_form(ApKind::Product, 1.0, -1.0, 2.0, 2), 0.0))
}

fn weights_zero_potential() -> Outcome {
    let c = theorem_constants(
        &WeightSpec::one(1)?,
        &WeightSpec::constant(1, 0.0)?,
        TheoremMode::Local { p: 3.0, tau: 2.0, beta: 0.5 },
        &unit_scan()?,
        &ScanOptions::default(),
    )?;
    Ok((c["W"].value == 0.0, c["W"].value))
}

fn sparse_maximal_of_constant() -> Outcome {
    let g = box1(4.0, 64);
    let s = CubeScan::standard(-2, 4, g)?;
    let m = dyadic_maximal(&SampledField::constant(g, 3.0), &[0; 3], &s)?;
    let err = m.values().iter().map(|v| (v - 3.0).abs()).fold(0.0, f64::max);
    Ok((err <= 1e-12, err))
}

fn sparse_maximal_of_indicator() -> Outcome {
    let g = box1(4.0, 256);
    let s = CubeScan::standard(-2, 6, g)?;
    let m = dyadic_maximal(&indicator(&g, 0.0, 1.0), &[0; 3], &s)?;
    let mut ok = true;
    for i in 0..g.cell_count() {
        let x = g.cell_center(i)[0];
        if (0.0..1.0).contains(&x) {
            ok &= (m.values()[i] - 1.0).abs() < 1e-12;
        } else if (1.0..2.0).contains(&x) {
            ok &= (m.values()[i] - 0.5).abs() < 1e-12;
        }
    }
    Ok((ok, 0.0))
}

fn sparse_fractional_at_zero() -> Outcome {
    let g = box1(4.0, 64);
    let s = CubeScan::standard(-2, 4, g)?;
    let f = SampledField::from_fn(g, |x| (-x[0] * x[0]).exp())?;
    let a = fractional_maximal(&f, 0.0, &s)?;
    let b = dyadic_maximal(&f, &[0; 3], &s)?;
    Ok((a.values() == b.values(), 0.0))
}

fn sparse_fractional_unit_cube() -> Outcome {
    let g = box1(4.0, 64);
    let s = CubeScan::standard(-2, 3, g)?;
    let m = fractional_maximal(&indicator(&g, 0.0, 1.0), 0.5, &s)?;
    let low = (0..g.cell_count())
        .filter(|&i| (0.0..1.0).contains(&g.cell_center(i)[0]))
        .map(|i| m.values()[i])
        .fold(f64::INFINITY, f64::min);
    Ok((low >= 1.0, low))
}

fn sparse_zero_family() -> Outcome {
    let g = box1(4.0, 64);
    let s = CubeScan::standard(-2, 4, g)?;
    let fam = build_sparse(&SampledField::zeros(g), &[0; 3], 4.0, &s)?;
    Ok((fam.is_empty(), fam.len() as f64))
}

fn one_cube_family(g: &SampleBox, cubes: Vec<DyadicCube>) -> SparseFamily {
    SparseFamily {
        shift: [0; 3],
        lambda: 4.0,
        witnesses: vec![vec![]; cubes.len()],
        cubes: cubes.into_iter().map(|cube| StoppingCube { cube, generation: 0, average: 0.0 }).collect(),
        eta_achieved: 1.0,
        grid: *g,
    }
}

fn sparse_single_cube() -> Outcome {
    let g = box1(4.0, 64);
    let q = DyadicCube::new(1, &[0], -1, &[0])?;
    let f = SampledField::constant(g, 2.0);
    let gamma = 0.5;
    let out = sparse_apply(&one_cube_family(&g, vec![q]), gamma, &f)?;
    let want = 2.0 * q.measure().powf(gamma);
    let ok = (0..g.cell_count()).all(|i| {
        let expect = if q.contains_point(&g.cell_center(i)) { want } else { 0.0 };
        (out.values()[i] - expect).abs() <= 1e-13 * want
    });
    Ok((ok, want))
}

fn sparse_empty_family() -> Outcome {
    let g = box1(4.0, 64);
    let out = sparse_apply(&one_cube_family(&g, vec![]), 0.3, &SampledField::constant(g, 2.0))?;
    Ok((out.max_abs() == 0.0, out.max_abs()))
}

fn sparse_riesz_zero() -> Outcome {
    let out = fractional_integral(&SampledField::zeros(box1(2.0, 32)), 0.5)?;
    Ok((out.max_abs() == 0.0, out.max_abs()))
}

fn sparse_riesz_closed_form() -> Outcome {
    let g = box1(4.0, 256);
    let out = fractional_integral(&indicator(&g, 0.0, 1.0), 0.5)?;
    let i = (0..g.cell_count()).find(|&i| g.cell_center(i)[0] > 0.5).unwrap();
    let x = g.cell_center(i)[0];
    let want = 2.0 * x.sqrt() + 2.0 * (1.0 - x).sqrt();
    Ok(close(out.values()[i], want, 1e-6 * want))
}

fn sparse_zero_domination() -> Outcome {
    let g = box1(4.0, 64);
    let s = CubeScan::standard(-2, 4, g)?;
    Ok((domination_ratio(&SampledField::zeros(g), 0.5, &[0.1], 4.0, &s, 1e-10).is_err(), 0.0))
}

fn gaussian_points(g: &SampleBox, var: f64) -> SampledField {
    SampledField::from_fn(*g, |x| (-x[0] * x[0] / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()).unwrap()
}

fn heat_cfg() -> HeatConfig {
    HeatConfig { tail_tol: 1e-8, ..HeatConfig::default() }
}

fn heat_constant() -> Outcome {
    let g = box1(8.0, 512);
    let k = HeatKernel::new(&g, 0.5, 1e-8)?;
    let u = k.apply(&SampledField::constant(g, 1.0))?;
    let r = k.radius();
    let err = (r..g.cells_per_axis() - r).map(|i| (u.values()[i] - 1.0).abs()).fold(0.0, f64::max);
    Ok((err <= 1e-8, err))
}

fn heat_gaussian() -> Outcome {
    let g = box1(8.0, 4096);
    let u = heat_apply(&gaussian_points(&g, 0.5), 0.25, &heat_cfg())?;
    let err = sup_diff(&u, &gaussian_points(&g, 1.0));
    Ok((err < 1e-6, err))
}

fn heat_semigroup() -> Outcome {
    let g = box1(8.0, 4096);
    let f = gaussian_points(&g, 0.5);
    let c = heat_cfg();
    let one = heat_apply(&f, 0.25, &c)?;
    let quad = sup_diff(&one, &gaussian_points(&g, 1.0));
    let two = heat_apply(&heat_apply(&f, 0.1, &c)?, 0.15, &c)?;
    let err = sup_diff(&two, &one);
    Ok((err <= 2.0 * (quad + c.tail_tol), err))
}

fn heat_norm_of_constant() -> Outcome {
    let g = SampleBox::new(2, 1.5, 32)?;
    let v = weighted_norm(&SampledField::constant(g, 1.0), 2.0, &WeightSpec::one(2)?)?;
    Ok(close(v, 3.0, 1e-12))
}

fn heat_norm_linear_weight() -> Outcome {
    let g = box1(2.0, 64);
    let v = weighted_norm(&indicator(&g, 0.0, 1.0), 1.0, &WeightSpec::power_hom(1, 1.0)?)?;
    Ok(close(v, 0.5, 1e-9))
}

fn smoothing_setup() -> Result<(SampledField, WeightSpec, CubeScan, HeatConfig)> {
    let g = box1(64.0, 4096);
    let f = SampledField::from_fn(g, |x| if x[0].abs() < 1.0 { (1.0 - x[0] * x[0]).powi(2) } else { 0.0 })?;
    Ok((f, WeightSpec::one(1)?, CubeScan::all_shifts(-2, 3, g)?, HeatConfig::new(1e-10, 1e-2, 1e1, 7)?))
}

fn heat_contraction() -> Outcome {
    let (f, one, s, c) = smoothing_setup()?;
    let r = smoothing_constant_scan(&f, &one, &one, 2.0, 2.0, 0.0, &c, &s, &ScanOptions::default())?;
    Ok((r.sup_ratio <= 1.0 + 1e-10, r.sup_ratio))
}

fn heat_homogeneity() -> Outcome {
    let (f, one, s, c) = smoothing_setup()?;
    let o = ScanOptions::default();
    let a = smoothing_constant_scan(&f, &one, &one, 2.0, 2.0, 0.0, &c, &s, &o)?.sup_ratio;
    let b = smoothing_constant_scan(&f.scale(10.0), &one, &one, 2.0, 2.0, 0.0, &c, &s, &o)?.sup_ratio;
    Ok(((a - b).abs() <= 1e-10 * a, b / a))
}

fn heat_sup_rate() -> Outcome {
    // Young: t^{1/(2p)} ‖G_t * f‖_∞ / ‖f‖_p stays below ‖G_1‖_{p'}, and the
    // Morrey bound of the unit weight is 1.
    let (f, one, s, c) = smoothing_setup()?;
    let o = ScanOptions { check_divergence: false, ..ScanOptions::default() };
    let p = 2.0;
    let r = smoothing_sup_scan(&f, &one, p, p, 0.0, &c, &s, &o)?;
    let pp = p / (p - 1.0);
    let g1 = (4.0 * PI).powf(-0.5) * pp.powf(-0.5 / pp) * (4.0 * PI).powf(0.5 / pp);
    let ok = r.sup_ratio <= g1 * (1.0 + 1e-8) && (r.bound.value - 1.0).abs() < 1e-12;
    Ok((ok, r.sup_ratio / g1))
}

fn heat_zero_input() -> Outcome {
    let (f, one, s, c) = smoothing_setup()?;
    let z = SampledField::zeros(*f.grid());
    let r = smoothing_sup_scan(&z, &one, 2.0, 2.0, 0.0, &c, &s, &ScanOptions::default());
    Ok((r == Err(Error::ZeroInputNorm), 0.0))
}

fn bump(g: &SampleBox, amp: f64) -> SampledField {
    SampledField::from_fn(*g, |x| amp * (-4.0 * x[0] * x[0]).exp()).unwrap()
}

fn problem(v: WeightSpec, tau: f64, amp: f64, mode: Mode) -> Result<HHProblem> {
    let g = box1(16.0, 512);
    Ok(HHProblem {
        p: 3.0,
        tau,
        sigma: WeightSpec::one(1)?,
        v,
        u0: bump(&g, amp),
        nonlinearity: Nonlinearity::SignedPower,
        mode,
    })
}

/// Smallest admissible beta, `n(tau-1)/p`, for the 1-D problems here.
fn local(t_final: f64, tau: f64) -> Mode {
    Mode::Local { t_final, beta: (tau - 1.0) / 3.0 }
}

fn cfg(steps: usize) -> SolverConfig {
    SolverConfig { steps, ..SolverConfig::default() }
}

fn free_flow(prob: &HHProblem, t: f64, c: f64) -> Result<SampledField> {
    Ok(HeatKernel::new(prob.u0.grid(), t, 1e-12)?.apply(&prob.u0)?.scale(c))
}

fn solver_zero_potential_duhamel() -> Outcome {
    let prob = problem(WeightSpec::constant(1, 0.0)?, 2.0, 0.5, local(0.5, 2.0))?;
    let tr = picard_local(&prob, &cfg(8))?.outcome.trajectory;
    let d = duhamel_apply(&tr, &prob, 0.25, &cfg(8))?;
    Ok((d.max_abs() == 0.0, d.max_abs()))
}

fn solver_constant_potential_identity() -> Outcome {
    let c = 0.3;
    let prob = problem(WeightSpec::constant(1, c)?, 1.0, 1.0, local(1.0, 1.0))?;
    let cf = cfg(32);
    let tr = picard_local(&prob, &cf)?.outcome.trajectory;
    let d = duhamel_apply(&tr, &prob, 1.0, &cf)?;
    let want = free_flow(&prob, 1.0, c.exp() - 1.0)?;
    let err = sup_diff(&d, &want);
    Ok((err < 1e-5, err))
}

fn solver_free_flow_one_iteration() -> Outcome {
    let prob = problem(WeightSpec::constant(1, 0.0)?, 2.0, 1.0, local(1.0, 2.0))?;
    let cf = cfg(16);
    let o = picard_local(&prob, &cf)?.outcome;
    let err = sup_diff(o.trajectory.fields.last().unwrap(), &free_flow(&prob, 1.0, 1.0)?);
    Ok((o.iterations <= 1 && err < 1e-10 && o.trajectory.residual <= cf.tol_fp, err))
}

fn solver_constant_potential_closed_form() -> Outcome {
    let c = 0.3;
    let prob = problem(WeightSpec::constant(1, c)?, 1.0, 1.0, local(1.0, 1.0))?;
    let tr = picard_local(&prob, &cfg(32))?.outcome.trajectory;
    let err = sup_diff(tr.fields.last().unwrap(), &free_flow(&prob, 1.0, c.exp())?);
    Ok((err < 1e-5, err))
}

fn solver_zero_data() -> Outcome {
    let prob = problem(WeightSpec::power_hom(1, -0.25)?, 2.0, 0.0, local(0.5, 2.0))?;
    let tr = picard_local(&prob, &cfg(8))?.outcome.trajectory;
    let m = tr.fields.iter().map(|f| f.max_abs()).fold(0.0, f64::max);
    Ok((m == 0.0, m))
}

fn global_free() -> Result<(HHProblem, Trajectory)> {
    let g = box1(64.0, 2048);
    let mut prob = problem(WeightSpec::constant(1, 0.0)?, 3.5, 1.0, Mode::Global { q: 4.0, q1: 4.0, alpha: 0.5 })?;
    prob.p = 2.0;
    prob.u0 = bump(&g, 1.0);
    let r = picard_global(&prob, 40.0, &cfg(40))?;
    Ok((prob, r.outcome.trajectory))
}

fn solver_global_free_decay() -> Outcome {
    let (_, tr) = global_free()?;
    let (slope, _) = decay_fit(&tr, (4.0, 40.0))?;
    Ok(((slope + 0.5).abs() <= 0.05, slope))
}

fn solver_exact_residual() -> Outcome {
    let prob = problem(WeightSpec::constant(1, 0.0)?, 2.0, 1.0, local(1.0, 2.0))?;
    let cf = cfg(16);
    let tr = picard_local(&prob, &cf)?.outcome.trajectory;
    let r = residual(&tr, &prob, &cf)?;
    Ok((r <= 1e-12, r))
}

fn solver_defect_injection() -> Outcome {
    let prob = problem(WeightSpec::power_hom(1, -1.0 / 6.0)?, 2.0, 0.5, local(0.5, 2.0))?;
    let cf = cfg(16);
    let mut tr = picard_local(&prob, &cf)?.outcome.trajectory;
    let delta = 1e-3;
    let vals: Vec<f64> = tr.fields[9].values().iter().map(|v| v + delta).collect();
    tr.fields[9] = tr.fields[9].with_values(vals)?;
    let shift_norm = delta * (2.0 * prob.u0.grid().halfwidth()).powf(1.0 / 3.0);
    let r = residual(&tr, &prob, &cf)? * tr.norm_xp.last().unwrap().max(1.0);
    Ok((r >= 0.5 * shift_norm, r / shift_norm))
}

fn solver_synthetic_decay() -> Outcome {
    let (_, mut tr) = global_free()?;
    let s = 0.7;
    for (t, f) in tr.times.iter().zip(tr.fields.iter_mut()) {
        let scale = if *t > 0.0 { t.powf(-s) / f.max_abs() } else { 1.0 };
        *f = f.scale(scale);
    }
    let (slope, _) = decay_fit(&tr, (1.0, 40.0))?;
    Ok(((slope + s).abs() < 1e-12, slope))
}

pub type Case = (&'static str, &'static str, fn() -> Outcome);

pub const CASES: &[Case] = &[
    ("grid", "constant field average", grid_constant_average),
    ("grid", "affine field midpoint average", grid_affine_midpoint),
    ("grid", "half indicator average", grid_indicator_average),
    ("grid", "aligned cube is its own cover", grid_aligned_cover),
    ("grid", "level 0 cubes of [-1,1]", grid_level_zero_cubes),
    ("grid", "levels 0..1 give six cubes", grid_two_levels),
    ("grid", "empty level range rejected", grid_empty_levels),
    ("weights", "unit weight measure", weights_lebesgue),
    ("weights", "|x| on [0,1)", weights_linear),
    ("weights", "A_2 of unit weight", weights_a2_of_one),
    ("weights", "A_inf of unit weight", weights_ainf_of_one),
    ("weights", "two-weight constant of unit weights", weights_two_weight_of_ones),
    ("weights", "Morrey norm of one with p = q", weights_morrey_of_one),
    ("weights", "ball envelope scales as R^n", weights_ball_lebesgue),
    ("weights", "|x|^0 in every A_p", weights_power_zero_in_ap),
    ("weights", "product weight in A_2", weights_product_in_a2),
    ("weights", "zero potential gives W = 0", weights_zero_potential),
    ("sparse", "maximal function of a constant", sparse_maximal_of_constant),
    ("sparse", "maximal function of an indicator", sparse_maximal_of_indicator),
    ("sparse", "fractional maximal at alpha = 0", sparse_fractional_at_zero),
    ("sparse", "fractional maximal on unit cube", sparse_fractional_unit_cube),
    ("sparse", "zero field gives empty family", sparse_zero_family),
    ("sparse", "single cube family", sparse_single_cube),
    ("sparse", "empty family", sparse_empty_family),
    ("sparse", "Riesz potential of zero", sparse_riesz_zero),
    ("sparse", "Riesz potential of an indicator", sparse_riesz_closed_form),
    ("sparse", "domination of zero rejected", sparse_zero_domination),
    ("heat", "constant preserved", heat_constant),
    ("heat", "Gaussian to Gaussian", heat_gaussian),
    ("heat", "semigroup law", heat_semigroup),
    ("heat", "norm of a constant", heat_norm_of_constant),
    ("heat", "indicator in L^1(|x|)", heat_norm_linear_weight),
    ("heat", "L^2 contraction", heat_contraction),
    ("heat", "homogeneity of the ratio", heat_homogeneity),
    ("heat", "L^p to L^inf rate", heat_sup_rate),
    ("heat", "zero input rejected", heat_zero_input),
    ("hh_solver", "Duhamel term of zero potential", solver_zero_potential_duhamel),
    ("hh_solver", "Duhamel term of constant potential", solver_constant_potential_identity),
    ("hh_solver", "free flow in one iteration", solver_free_flow_one_iteration),
    ("hh_solver", "constant potential closed form", solver_constant_potential_closed_form),
    ("hh_solver", "zero data stays zero", solver_zero_data),
    ("hh_solver", "free global decay rate", solver_global_free_decay),
    ("hh_solver", "exact solution residual", solver_exact_residual),
    ("hh_solver", "residual detects a defect", solver_defect_injection),
    ("hh_solver", "synthetic power decay", solver_synthetic_decay),
];
