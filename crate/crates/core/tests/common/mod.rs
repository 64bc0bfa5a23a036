#![allow(dead_code)]

use hhlab_core::grid::{CubeScan, SampleBox, SampledField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 20240917;
pub const CORPUS_SIZE: usize = 50;

/// 1-D box for the sparse corpus: `[-32, 32]` with 4096 cells.
pub fn corpus_grid() -> SampleBox {
    SampleBox::new(1, 32.0, 4096).unwrap()
}

/// Scan matched to [`corpus_grid`]: top cubes of side 64, finest of side 1/32.
pub fn corpus_scan(grid: &SampleBox) -> CubeScan {
    CubeScan::all_shifts(-6, 5, *grid).unwrap()
}

/// Non-negative fields built from a few random plateaus and bumps inside
/// `[-4, 4]`.
pub fn corpus(grid: &SampleBox, seed: u64, count: usize) -> Vec<SampledField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let pieces: Vec<(f64, f64, f64, bool)> = (0..rng.gen_range(1..=4))
                .map(|_| {
                    let c = rng.gen_range(-3.5..3.5);
                    let w = rng.gen_range(0.05..0.5);
                    let a = 10f64.powf(rng.gen_range(-1.0..1.0));
                    (c, w, a, rng.gen_bool(0.5))
                })
                .collect();
            SampledField::from_fn(*grid, |x| {
                pieces
                    .iter()
                    .map(|&(c, w, a, flat)| {
                        let d = (x[0] - c).abs() / w;
                        match (flat, d < 1.0) {
                            (true, true) => a,
                            (false, true) => a * (1.0 - d * d).powi(2),
                            _ => 0.0,
                        }
                    })
                    .sum()
            })
            .unwrap()
        })
        .collect()
}

/// Brute-force cube average straight from the field's box integral.
pub fn direct_average(f: &SampledField, q: &hhlab_core::grid::DyadicCube) -> f64 {
    f.cube_integral(q) / q.measure()
}
