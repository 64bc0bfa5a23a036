use hhlab_core::grid::{CubeScan, SampleBox, SampledField};
use hhlab_core::heat::{
    heat_apply, smoothing_constant_scan, smoothing_sup_scan, weighted_norm, HeatConfig, HeatKernel,
};
use hhlab_core::weights::{ScanOptions, WeightSpec};
use hhlab_core::Error;
use proptest::prelude::*;

/// Point samples of the centred Gaussian of variance `var` in 1-D.
fn gaussian_points(grid: &SampleBox, var: f64) -> SampledField {
    SampledField::from_fn(*grid, |x| (-x[0] * x[0] / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt())
        .unwrap()
}

fn sup_diff(a: &SampledField, b: &SampledField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn bump(grid: &SampleBox) -> SampledField {
    SampledField::from_fn(*grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 < 1.0 {
            (1.0 - r2).powi(2)
        } else {
            0.0
        }
    })
    .unwrap()
}

fn cfg(tail_tol: f64) -> HeatConfig {
    HeatConfig { tail_tol, ..HeatConfig::default() }
}

#[test]
fn gaussian_to_gaussian() {
    let g = SampleBox::new(1, 8.0, 4096).unwrap();
    let u = heat_apply(&gaussian_points(&g, 0.5), 0.25, &cfg(1e-8)).unwrap();
    let err = sup_diff(&u, &gaussian_points(&g, 1.0));
    assert!(err < 1e-6, "{err}");
}

#[test]
fn mass_is_conserved() {
    for dim in [1usize, 2] {
        let g = SampleBox::new(dim, 16.0, if dim == 1 { 1024 } else { 128 }).unwrap();
        let f = bump(&g);
        let l1 = f.integral();
        for t in [1e-3, 0.1, 1.0, 2.0] {
            let u = heat_apply(&f, t, &cfg(1e-8)).unwrap();
            assert!((u.integral() - l1).abs() <= dim as f64 * 1e-8 * l1, "dim {dim} t {t}");
        }
    }
}

#[test]
fn semigroup_law() {
    let g = SampleBox::new(1, 8.0, 4096).unwrap();
    let f = gaussian_points(&g, 0.5);
    let c = cfg(1e-8);
    // Combined tolerance: closed-form error at this resolution plus the tail.
    let quad = sup_diff(&heat_apply(&f, 0.25, &c).unwrap(), &gaussian_points(&g, 1.0));
    let two_step = heat_apply(&heat_apply(&f, 0.1, &c).unwrap(), 0.15, &c).unwrap();
    let one_step = heat_apply(&f, 0.25, &c).unwrap();
    let err = sup_diff(&two_step, &one_step);
    assert!(err <= 2.0 * (quad + c.tail_tol), "{err} vs {quad}");
}

#[test]
fn constant_is_preserved_away_from_edges() {
    let g = SampleBox::new(1, 8.0, 512).unwrap();
    let k = HeatKernel::new(&g, 0.5, 1e-8).unwrap();
    let u = k.apply(&SampledField::constant(g, 1.0)).unwrap();
    let r = k.radius();
    for i in r..g.cells_per_axis() - r {
        assert!((u.values()[i] - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn sup_norm_decays_in_time() {
    let g = SampleBox::new(2, 8.0, 64).unwrap();
    let f = bump(&g);
    let c = HeatConfig::new(1e-10, 1e-3, 0.3, 12).unwrap();
    let mut prev = f.max_abs();
    for t in c.times() {
        let m = heat_apply(&f, t, &c).unwrap().max_abs();
        assert!(m <= prev * (1.0 + 1e-14));
        prev = m;
    }
}

#[test]
fn contraction_with_unit_weights() {
    let g = SampleBox::new(1, 64.0, 4096).unwrap();
    let f = bump(&g);
    let one = WeightSpec::one(1).unwrap();
    let scan = CubeScan::all_shifts(-2, 3, g).unwrap();
    let c = HeatConfig::new(1e-10, 1e-2, 1e1, 7).unwrap();
    let o = ScanOptions::default();
    let r = smoothing_constant_scan(&f, &one, &one, 2.0, 2.0, 0.0, &c, &scan, &o).unwrap();
    assert!(r.sup_ratio <= 1.0 + 1e-10);
    let r10 = smoothing_constant_scan(&f.scale(10.0), &one, &one, 2.0, 2.0, 0.0, &c, &scan, &o).unwrap();
    assert!((r10.sup_ratio - r.sup_ratio).abs() <= 1e-10 * r.sup_ratio);
}

#[test]
fn cor_heat_i_tuple_is_stable() {
    let g = SampleBox::new(1, 128.0, 8192).unwrap();
    let f = bump(&g);
    let sigma = WeightSpec::power_hom(1, 0.5).unwrap();
    let w = WeightSpec::power_hom(1, 0.5).unwrap();
    let scan = CubeScan::all_shifts(-4, 5, g).unwrap();
    let o = ScanOptions::default();
    let c = HeatConfig::new(1e-10, 1e-3, 1e1, 9).unwrap();
    let r = smoothing_constant_scan(&f, &sigma, &w, 2.0, 2.0, 0.0, &c, &scan, &o).unwrap();
    assert!(!r.bound.divergent && r.bound.value.is_finite());
    let ratios: Vec<f64> = r.per_time.iter().map(|x| x.1).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo < 3.0, "{ratios:?}");
}

#[test]
fn ratio_to_bound_is_dilation_invariant() {
    let sigma = WeightSpec::power_hom(1, 0.5).unwrap();
    let w = WeightSpec::power_hom(1, 0.5).unwrap();
    let o = ScanOptions { check_divergence: false, ..ScanOptions::default() };
    let run = |scale: f64, shift_levels: i32| {
        let g = SampleBox::new(1, 16.0 * scale, 1024).unwrap();
        let f = SampledField::from_fn(g, |x| {
            let r = x[0] / scale;
            if r.abs() < 1.0 {
                (1.0 - r * r).powi(2)
            } else {
                0.0
            }
        })
        .unwrap();
        let scan = CubeScan::all_shifts(-3 - shift_levels, 3 - shift_levels, g).unwrap();
        let c = HeatConfig::new(1e-10, 1e-2 * scale * scale, scale * scale, 5).unwrap();
        let r = smoothing_constant_scan(&f, &sigma, &w, 2.0, 2.0, 0.0, &c, &scan, &o).unwrap();
        r.c_emp()
    };
    let a = run(1.0, 0);
    let b = run(2.0, 1);
    assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
}

#[test]
fn sup_scan_with_unit_sigma() {
    // Young: t^{n/(2p)} ‖G_t * f‖_∞ ≤ ‖G_1‖_{p'} ‖f‖_p, and ‖1‖_{M^∞_{p'}} = 1.
    let g = SampleBox::new(1, 32.0, 2048).unwrap();
    let f = bump(&g);
    let one = WeightSpec::one(1).unwrap();
    let scan = CubeScan::all_shifts(-2, 3, g).unwrap();
    let c = HeatConfig::new(1e-10, 1e-2, 1e1, 7).unwrap();
    let o = ScanOptions { check_divergence: false, ..ScanOptions::default() };
    let p = 2.0;
    let r = smoothing_sup_scan(&f, &one, p, p, 0.0, &c, &scan, &o).unwrap();
    let pp = p / (p - 1.0);
    let g1 = (4.0 * std::f64::consts::PI).powf(-0.5) * pp.powf(-0.5 / pp) * (4.0 * std::f64::consts::PI).powf(0.5 / pp);
    assert!((r.bound.value - 1.0).abs() < 1e-12);
    assert!(r.sup_ratio <= g1 * (1.0 + 1e-8), "{} vs {g1}", r.sup_ratio);
    assert_eq!(smoothing_sup_scan(&SampledField::zeros(g), &one, p, p, 0.0, &c, &scan, &o), Err(Error::ZeroInputNorm));
}

#[test]
fn weighted_norm_of_constant() {
    let g = SampleBox::new(2, 1.5, 32).unwrap();
    let f = SampledField::constant(g, 1.0);
    for p in [1.0, 2.0, 3.5] {
        let v = weighted_norm(&f, p, &WeightSpec::one(2).unwrap()).unwrap();
        assert!((v - 9f64.powf(1.0 / p)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn heat_preserves_sign(values in proptest::collection::vec(0.0f64..10.0, 128), t in 1e-3f64..0.3) {
        let g = SampleBox::new(1, 8.0, 128).unwrap();
        let f = SampledField::new(g, values).unwrap();
        let u = heat_apply(&f, t, &cfg(1e-10)).unwrap();
        prop_assert!(u.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn weighted_norm_triangle_and_monotone(
        a in proptest::collection::vec(-5.0f64..5.0, 64),
        b in proptest::collection::vec(-5.0f64..5.0, 64),
        p in 1.0f64..4.0,
    ) {
        let g = SampleBox::new(1, 4.0, 64).unwrap();
        let w = WeightSpec::power_hom(1, -0.5).unwrap();
        let fa = SampledField::new(g, a.clone()).unwrap();
        let fb = SampledField::new(g, b.clone()).unwrap();
        let sum = SampledField::new(g, a.iter().zip(&b).map(|(x, y)| x + y).collect()).unwrap();
        let big = SampledField::new(g, a.iter().map(|x| 2.0 * x.abs() + 0.1).collect()).unwrap();
        let (na, nb, ns) = (
            weighted_norm(&fa, p, &w).unwrap(),
            weighted_norm(&fb, p, &w).unwrap(),
            weighted_norm(&sum, p, &w).unwrap(),
        );
        prop_assert!(ns <= (na + nb) * (1.0 + 1e-12));
        prop_assert!(na <= weighted_norm(&big, p, &w).unwrap());
    }
}
