//! Two-sided envelopes for `‖|·|^α ⟨·⟩^β‖_{L¹(B(x0,R))}`.

use crate::error::{Error, Result};

/// Which envelope applies to a ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallCase {
    /// `|x0| >= 3R`: `|x0|^α ⟨x0⟩^β R^n`.
    TypeI,
    /// `|x0| < 3R`, `β = 0`: `R^{α+n}`.
    TypeIIPower,
    /// `|x0| < 3R`, `α = 0`: `R^n (1+R)^β` below, `R^n` or `1 + R^{β+n}` above.
    TypeIIBracket,
    /// `|x0| < 3R`, general product: `R^{α+n}(1+R)^β` below,
    /// `R^{α+n}` or `1 + R^{α+β+n}` above.
    TypeIIProduct,
}

/// Envelope constants. The bounds used are `lower · 4^{-(|α|+|β|)}` and
/// `upper · 4^{|α|+|β|}` times the case profile; the base values were frozen
/// after calibration against polar ball integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallEnvelope {
    pub lower: f64,
    pub upper: f64,
}

impl Default for BallEnvelope {
    fn default() -> Self {
        Self { lower: 0.02, upper: 60.0 }
    }
}

/// Lower and upper envelopes for the `L¹` norm of `|x|^α ⟨x⟩^β` over the
/// ball of radius `r` centred at distance `center_norm` from the origin.
pub fn ball_norm_oracle(
    n: usize,
    alpha: f64,
    beta: f64,
    center_norm: f64,
    r: f64,
    env: &BallEnvelope,
) -> Result<(f64, f64, BallCase)> {
    if !(r > 0.0 && center_norm >= 0.0) {
        return Err(Error::InvalidParameter("need R > 0 and |x0| >= 0".into()));
    }
    let nf = n as f64;
    let spread = 4f64.powf(alpha.abs() + beta.abs());
    let (c_lo, c_hi) = (env.lower / spread, env.upper * spread);
    let bracket = |x: f64| (1.0 + x * x).sqrt();
    if center_norm >= 3.0 * r {
        let base = center_norm.powf(alpha) * bracket(center_norm).powf(beta) * r.powf(nf);
        return Ok((c_lo * base, c_hi * base, BallCase::TypeI));
    }
    if alpha <= -nf {
        return Err(Error::NotLocallyIntegrable(format!("type II ball with alpha = {alpha} <= -{n}")));
    }
    let (case, lo, hi) = if beta == 0.0 {
        let v = r.powf(alpha + nf);
        (BallCase::TypeIIPower, v, v)
    } else if alpha == 0.0 {
        let hi = if r <= 1.0 { r.powf(nf) } else { 1.0 + r.powf(beta + nf) };
        (BallCase::TypeIIBracket, r.powf(nf) * (1.0 + r).powf(beta), hi)
    } else {
        let hi = if r <= 1.0 { r.powf(alpha + nf) } else { 1.0 + r.powf(alpha + beta + nf) };
        (BallCase::TypeIIProduct, r.powf(alpha + nf) * (1.0 + r).powf(beta), hi)
    };
    Ok((c_lo * lo, c_hi * hi, case))
}
