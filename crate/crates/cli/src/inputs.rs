//! Grids, fields, weights and scans built from validated parameters.

use hhlab_core::grid::{CubeScan, SampleBox, SampledField};
use hhlab_core::weights::{ScanOptions, WeightSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Params;
use crate::error::CliError;

pub fn dim(p: &Params) -> Result<usize, CliError> {
    let n = p.count("n")?;
    if !(1..=3).contains(&n) {
        return Err(CliError::Config(format!("n must be 1, 2 or 3, got {n}")));
    }
    Ok(n)
}

pub fn grid(p: &Params) -> Result<SampleBox, CliError> {
    Ok(SampleBox::new(dim(p)?, p.num("L")?, p.count("N")?)?)
}

fn random_bumps(grid: &SampleBox, seed: u64, amp: f64, width: f64) -> Result<SampledField, CliError> {
    let n = grid.dim();
    let half = 0.5 * grid.halfwidth();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(Vec<f64>, f64, f64)> = (0..4)
        .map(|_| {
            let c = (0..n).map(|_| rng.gen_range(-half..half)).collect();
            (c, rng.gen_range(0.2..1.0) * width, rng.gen_range(0.5..1.0) * amp)
        })
        .collect();
    Ok(SampledField::from_fn_averaged(*grid, 4, |x| {
        bumps
            .iter()
            .map(|(c, w, a)| {
                let r2: f64 = x.iter().zip(c).map(|(xi, ci)| (xi - ci).powi(2)).sum();
                a * (-r2 / (w * w)).exp()
            })
            .sum()
    })?)
}

/// Cell averages of the field named by `field`.
pub fn field(p: &Params, grid: &SampleBox) -> Result<SampledField, CliError> {
    let amp = p.num("amp")?;
    let width = p.num("width")?;
    if !(width > 0.0) {
        return Err(CliError::Config("width must be positive".into()));
    }
    let g = *grid;
    let norm2 = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let f =
        match p.text("field")? {
            "bump" => SampledField::from_fn_averaged(g, 4, |x| {
                let s = norm2(x) / (width * width);
                if s < 1.0 {
                    amp * (1.0 - 1.0 / (1.0 - s)).exp()
                } else {
                    0.0
                }
            })?,
            "gaussian" => SampledField::from_fn_averaged(g, 4, |x| amp * (-norm2(x) / (2.0 * width)).exp())?,
            "indicator" => SampledField::from_fn_averaged(g, 4, |x| {
                if x.iter().all(|v| (0.0..width).contains(v)) {
                    amp
                } else {
                    0.0
                }
            })?,
            "random" => random_bumps(grid, p.int("seed")? as u64, amp, width)?,
            "file" => {
                let path = p.text("field_path")?;
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
                let values = text
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().map(|v| amp * v))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Config(format!("{path}: {e}")))?;
                if values.len() != grid.cell_count() {
                    return Err(CliError::Config(format!(
                        "{path}: {} values for {} cells",
                        values.len(),
                        grid.cell_count()
                    )));
                }
                SampledField::new(g, values)?
            }
            other => return Err(CliError::Config(format!("unknown field {other:?}"))),
        };
    Ok(f)
}

/// Weight from `<prefix>_kind`, `<prefix>_alpha`, ... (bare names when the
/// prefix is empty). Product means `⟨x⟩^alpha |x|^beta`.
pub fn weight(p: &Params, prefix: &str, n: usize) -> Result<WeightSpec, CliError> {
    let k = |s: &str| if prefix.is_empty() { s.to_string() } else { format!("{prefix}_{s}") };
    let alpha = p.num(&k("alpha"))?;
    let beta = p.num(&k("beta"))?;
    let w = match p.text(&k("kind"))? {
        "one" => WeightSpec::one(n)?,
        "constant" => WeightSpec::constant(n, p.num(&k("c"))?)?,
        "power" => WeightSpec::power_hom(n, alpha)?,
        "bracket" => WeightSpec::bracket(n, alpha)?,
        "product" => WeightSpec::product(n, beta, alpha)?,
        other => return Err(CliError::Config(format!("unknown weight kind {other:?}"))),
    };
    Ok(w)
}

/// Scan over cubes meeting `restrict`. Missing level bounds default to
/// cubes of side `2L` down to one cell (or to `2^{8-2n}` times finer than
/// the coarsest when the box is not a sampling grid).
pub fn scan(p: &mut Params, restrict: &SampleBox, fine_to_cells: bool) -> Result<CubeScan, CliError> {
    let coarse = -(2.0 * restrict.halfwidth()).log2().ceil() as i32;
    let fine = if fine_to_cells {
        (1.0 / restrict.cell_width()).log2().floor() as i32
    } else {
        coarse + 8 - 2 * restrict.dim() as i32
    };
    let lo = p.opt_int("level_min").map(|v| v as i32).unwrap_or(coarse);
    let hi = p.opt_int("level_max").map(|v| v as i32).unwrap_or(fine);
    p.set_derived("level_min", lo.to_string());
    p.set_derived("level_max", hi.to_string());
    let s = match p.text("shifts")? {
        "all" => CubeScan::all_shifts(lo, hi, *restrict)?,
        "standard" => CubeScan::standard(lo, hi, *restrict)?,
        other => return Err(CliError::Config(format!("unknown shifts {other:?}"))),
    };
    Ok(s)
}

pub fn scan_options(p: &Params) -> Result<ScanOptions, CliError> {
    let mut o = ScanOptions::default();
    if p.has("tol") {
        o.tol = p.num("tol")?;
    }
    o.growth_threshold = p.num("growth")?;
    Ok(o)
}
