//! Closed-form admissibility checks for power and bracket weights.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApKind {
    /// `|x|^α`.
    Power,
    /// `⟨x⟩^α |x|^β`.
    Product,
}

/// Whether `|x|^α` (power) or `⟨x⟩^α |x|^β` (product) lies in `A_p`.
pub fn is_ap_closed_form(kind: ApKind, alpha: f64, beta: f64, p: f64, n: usize) -> bool {
    let n = n as f64;
    match kind {
        ApKind::Power => -n < alpha && alpha < n * (p - 1.0),
        ApKind::Product => {
            let s = alpha + beta;
            -n <= s && s <= n * (p - 1.0) && -n < beta && beta < n * (p - 1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corollary {
    HeatI,
    HeatII,
    HeatIII,
    HeatIV,
    LocalI,
    LocalII,
    LocalIII,
    LocalIV,
    GlobalI,
    GlobalII,
    GlobalIII,
    GlobalIV,
}

impl Corollary {
    pub const ALL: [Corollary; 12] = [
        Corollary::HeatI,
        Corollary::HeatII,
        Corollary::HeatIII,
        Corollary::HeatIV,
        Corollary::LocalI,
        Corollary::LocalII,
        Corollary::LocalIII,
        Corollary::LocalIV,
        Corollary::GlobalI,
        Corollary::GlobalII,
        Corollary::GlobalIII,
        Corollary::GlobalIV,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Corollary::HeatI => "HEAT_I",
            Corollary::HeatII => "HEAT_II",
            Corollary::HeatIII => "HEAT_III",
            Corollary::HeatIV => "HEAT_IV",
            Corollary::LocalI => "LOCAL_I",
            Corollary::LocalII => "LOCAL_II",
            Corollary::LocalIII => "LOCAL_III",
            Corollary::LocalIV => "LOCAL_IV",
            Corollary::GlobalI => "GLOBAL_I",
            Corollary::GlobalII => "GLOBAL_II",
            Corollary::GlobalIII => "GLOBAL_III",
            Corollary::GlobalIV => "GLOBAL_IV",
        }
    }
}

impl fmt::Display for Corollary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Corollary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Corollary::ALL
            .iter()
            .copied()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown corollary case {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RegionParams {
    pub n: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub q1: Option<f64>,
    pub tau: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

impl RegionParams {
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "n" => &mut self.n,
            "p" => &mut self.p,
            "q" => &mut self.q,
            "q1" => &mut self.q1,
            "tau" => &mut self.tau,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            _ => return Err(Error::InvalidParameter(format!("unknown region parameter {key:?}"))),
        };
        *slot = Some(value);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionQuery {
    pub corollary: Corollary,
    pub params: RegionParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub admissible: bool,
    pub witness: BTreeMap<String, f64>,
    pub violated: Vec<String>,
    /// Every condition evaluated, in order.
    pub checked: Vec<String>,
}

/// Slack for floating comparisons, relative to the magnitudes compared.
const EPS: f64 = 1e-12;

fn le(a: f64, b: f64) -> bool {
    a <= b + EPS * (1.0 + a.abs().max(b.abs()))
}

fn lt(a: f64, b: f64) -> bool {
    a < b - EPS * (1.0 + a.abs().max(b.abs()))
}

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS * (1.0 + a.abs().max(b.abs()))
}

struct Checker {
    violated: Vec<String>,
    checked: Vec<String>,
}

impl Checker {
    fn check(&mut self, name: &str, ok: bool) {
        self.checked.push(name.to_string());
        if !ok {
            self.violated.push(name.to_string());
        }
    }
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    let x = v.ok_or_else(|| Error::MissingParameter(name.to_string()))?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be finite, got {x}")));
    }
    Ok(x)
}

fn finite_opt(v: Option<f64>, name: &str) -> Result<Option<f64>> {
    match v {
        Some(x) if !x.is_finite() => Err(Error::InvalidParameter(format!("{name} must be finite, got {x}"))),
        other => Ok(other),
    }
}

/// Evaluates every condition of the named case literally.
pub fn check_region(query: &RegionQuery) -> Result<RegionReport> {
    let pr = &query.params;
    let n = need(pr.n, "n")?;
    if n < 1.0 || n.fract() != 0.0 {
        return Err(Error::InvalidParameter(format!("n must be a positive integer, got {n}")));
    }
    let mut c = Checker { violated: Vec::new(), checked: Vec::new() };
    let mut witness = BTreeMap::new();
    use Corollary::*;
    match query.corollary {
        HeatI | HeatII | HeatIII | HeatIV => {
            let p = need(pr.p, "p")?;
            let q = need(pr.q, "q")?;
            let alpha = need(pr.alpha, "alpha")?;
            let beta = need(pr.beta, "beta")?;
            let gamma = need(pr.gamma, "gamma")?;
            let d = n * (1.0 / p - 1.0 / q);
            c.check("1 < p", lt(1.0, p));
            c.check("p <= q", le(p, q));
            c.check("n(1/p-1/q) <= gamma", le(d, gamma));
            c.check("gamma < n", lt(gamma, n));
            let top = d + (alpha - beta);
            match query.corollary {
                HeatI => {
                    c.check("-n/q < beta", lt(-n / q, beta));
                    c.check("beta <= alpha", le(beta, alpha));
                    c.check("alpha < n(1-1/p)", lt(alpha, n * (1.0 - 1.0 / p)));
                    c.check("gamma = n(1/p-1/q) + (alpha-beta)", eq(gamma, top));
                }
                HeatII => {
                    c.check("-n/q < beta", lt(-n / q, beta));
                    c.check("beta <= 0", le(beta, 0.0));
                    c.check("0 <= alpha", le(0.0, alpha));
                    c.check("alpha <= n(1-1/p)", le(alpha, n * (1.0 - 1.0 / p)));
                    c.check("n(1/p-1/q) - beta <= gamma", le(d - beta, gamma));
                    c.check("gamma <= n(1/p-1/q) + (alpha-beta)", le(gamma, top));
                }
                HeatIII => {
                    c.check("-n/q <= beta", le(-n / q, beta));
                    c.check("beta <= 0", le(beta, 0.0));
                    c.check("0 <= alpha", le(0.0, alpha));
                    c.check("alpha < n(1-1/p)", lt(alpha, n * (1.0 - 1.0 / p)));
                    c.check("n(1/p-1/q) + alpha <= gamma", le(d + alpha, gamma));
                    c.check("gamma <= n(1/p-1/q) + (alpha-beta)", le(gamma, top));
                }
                _ => {
                    c.check("-n/q <= beta", le(-n / q, beta));
                    c.check("beta <= alpha", le(beta, alpha));
                    c.check("alpha <= n(1-1/p)", le(alpha, n * (1.0 - 1.0 / p)));
                    c.check("gamma <= n(1/p-1/q) + (alpha-beta)", le(gamma, top));
                }
            }
            witness.insert("sigma_exponent".into(), alpha * p);
            witness.insert("w_exponent".into(), beta * q);
        }
        LocalI | LocalII | LocalIII | LocalIV => {
            let p = need(pr.p, "p")?;
            let tau = need(pr.tau, "tau")?;
            let alpha = need(pr.alpha, "alpha")?;
            let gamma = need(pr.gamma, "gamma")?;
            c.check("1 < p", lt(1.0, p));
            c.check("1 <= tau", le(1.0, tau));
            c.check("tau < min(p, 1+2p/n)", lt(tau, p.min(1.0 + 2.0 * p / n)));
            let a_tau = (n + alpha) * tau / p - n;
            let a_tm1 = (n + alpha) * (tau - 1.0) / p - 2.0;
            match query.corollary {
                LocalI => {
                    c.check("-n < alpha", lt(-n, alpha));
                    c.check("alpha < n(p-tau)", lt(alpha, n * (p - tau)));
                    let upper = alpha / p * (tau - 1.0);
                    c.check("(alpha/p)(tau-1) - n(1-tau/p) <= gamma", le(upper - n * (1.0 - tau / p), gamma));
                    c.check("gamma <= (alpha/p)(tau-1)", le(gamma, upper));
                    c.check("max((n+alpha)tau/p - n, (n+alpha)(tau-1)/p - 2) < gamma", lt(a_tau.max(a_tm1), gamma));
                    let beta = (n + alpha) * (tau - 1.0) / p - gamma;
                    witness.insert("beta".into(), beta);
                    witness.insert("ell".into(), beta - n * (tau - 1.0) / p);
                }
                LocalII => {
                    c.check("0 <= alpha", le(0.0, alpha));
                    c.check("alpha <= n(p-1)", le(alpha, n * (p - 1.0)));
                    if alpha == 0.0 {
                        c.check("n tau/p - n < gamma (alpha = 0)", lt(n * tau / p - n, gamma));
                    } else {
                        c.check("(n+alpha)tau/p - n <= gamma (alpha > 0)", le(a_tau, gamma));
                    }
                    c.check("gamma <= 0", le(gamma, 0.0));
                    c.check("n(tau-1)/p - 2 < gamma", lt(n * (tau - 1.0) / p - 2.0, gamma));
                }
                LocalIII => {
                    let bound = if tau == 1.0 {
                        n * (p / tau - 1.0)
                    } else {
                        (n * (p / tau - 1.0)).min(2.0 * p / (tau - 1.0) - n)
                    };
                    c.check("-n < alpha", lt(-n, alpha));
                    c.check("alpha < min(n(p/tau-1), 2p/(tau-1) - n)", lt(alpha, bound));
                    c.check("(n+alpha)tau/p - n <= gamma", le(a_tau, gamma));
                    c.check("gamma <= 0", le(gamma, 0.0));
                    c.check("0 <= (alpha/p)(tau-1)", le(0.0, alpha / p * (tau - 1.0)));
                }
                _ => {
                    c.check("-n <= alpha", le(-n, alpha));
                    c.check("alpha <= n(p-tau)", le(alpha, n * (p - tau)));
                    let upper = alpha / p * (tau - 1.0);
                    let lower = a_tau.max(upper - n * (1.0 - tau / p));
                    c.check("max((n+alpha)tau/p - n, (alpha/p)(tau-1) - n(1-tau/p)) <= gamma", le(lower, gamma));
                    c.check(
                        "gamma <= min((n+alpha)tau/p, (alpha/p)(tau-1))",
                        le(gamma, ((n + alpha) * tau / p).min(upper)),
                    );
                    c.check("(n+alpha)(tau-1)/p - 2 < gamma", lt(a_tm1, gamma));
                }
            }
            witness.insert("r".into(), p / tau);
        }
        GlobalI | GlobalII | GlobalIII | GlobalIV => {
            let p = need(pr.p, "p")?;
            let tau = need(pr.tau, "tau")?;
            let alpha = need(pr.alpha, "alpha")?;
            let q = finite_opt(pr.q, "q")?.unwrap_or(p);
            let q1 = finite_opt(pr.q1, "q1")?.unwrap_or(q);
            c.check("max(1, n/2) < p", lt(1.0f64.max(n / 2.0), p));
            c.check("2 < tau", lt(2.0, tau));
            c.check("tau < 1+2p/n", lt(tau, 1.0 + 2.0 * p / n));
            if query.corollary == GlobalIV {
                c.check("q = p", eq(q, p));
                c.check("q1 = p", eq(q1, p));
            } else {
                c.check("q = q1", eq(q, q1));
                c.check("p <= q", le(p, q));
            }
            let edge = (n + alpha) * (tau - 1.0) / p - 2.0;
            match query.corollary {
                GlobalI => {
                    let gamma = match finite_opt(pr.gamma, "gamma")? {
                        Some(g) => {
                            c.check("gamma = (n+alpha)(tau-1)/p - 2", eq(g, edge));
                            g
                        }
                        None => edge,
                    };
                    c.check("0 <= alpha", le(0.0, alpha));
                    c.check(
                        "alpha < min(n(p-1), 2p/(tau-1) - n)",
                        lt(alpha, (n * (p - 1.0)).min(2.0 * p / (tau - 1.0) - n)),
                    );
                    c.check("-(n-2)p/(tau-2) - n < alpha", lt(-(n - 2.0) * p / (tau - 2.0) - n, alpha));
                    let alpha_t = (2.0 + gamma) / (tau - 1.0) - n / q;
                    let beta_t = 2.0 - (alpha_t + n / q) * (tau - 1.0);
                    witness.insert("gamma".into(), gamma);
                    witness.insert("alpha_T".into(), alpha_t);
                    witness.insert("beta".into(), beta_t);
                    witness.insert("ell".into(), alpha_t - n * (1.0 / p - 1.0 / q));
                    witness.insert("ell1".into(), 2.0 - (alpha_t + n / q) * (tau - 2.0) - n / p);
                    witness.insert("beta1".into(), alpha_t + beta_t + n * (1.0 / q - 1.0 / q1));
                }
                GlobalII => {
                    let gamma = need(pr.gamma, "gamma")?;
                    c.check("0 <= alpha", le(0.0, alpha));
                    c.check("alpha <= n(p-1)", le(alpha, n * (p - 1.0)));
                    let lower = ((n + alpha) / p - n).max(-n * (1.0 - 1.0 / p) * (tau - 1.0) - 2.0);
                    c.check("max((n+alpha)/p - n, -n(1-1/p)(tau-1) - 2) <= gamma", le(lower, gamma));
                    c.check("gamma <= (n+alpha)(tau-1)/p - 2", le(gamma, edge));
                    c.check("1 + 2/n <= tau", le(1.0 + 2.0 / n, tau));
                }
                GlobalIII => {
                    let gamma = need(pr.gamma, "gamma")?;
                    c.check("n >= 2", n >= 2.0);
                    c.check("0 < alpha", lt(0.0, alpha));
                    c.check("alpha < n(p-1)", lt(alpha, n * (p - 1.0)));
                    c.check("alpha <= 2p - n(tau-1)", le(alpha, 2.0 * p - n * (tau - 1.0)));
                    c.check("(n+alpha)/p - n <= gamma", le((n + alpha) / p - n, gamma));
                    c.check("gamma <= (alpha/p - 2)/(tau-1) + n/p", le(gamma, (alpha / p - 2.0) / (tau - 1.0) + n / p));
                    c.check("-n(1-1/p) < gamma", lt(-n * (1.0 - 1.0 / p), gamma));
                }
                _ => {
                    let gamma = need(pr.gamma, "gamma")?;
                    c.check(
                        "n = 2, 3 or (n >= 4 and n/(n-2) <= p)",
                        n == 2.0 || n == 3.0 || (n >= 4.0 && le(n / (n - 2.0), p)),
                    );
                    c.check("0 <= alpha", le(0.0, alpha));
                    let amax = (n * (p - 1.0))
                        .min((2.0 * p - n) / (tau - 2.0) + p * (n - 2.0) - n)
                        .min(2.0 * p / (tau - 1.0) + p * (n - 2.0));
                    c.check("alpha <= min(n(p-1), (2p-n)/(tau-2) + p(n-2) - n, 2p/(tau-1) + p(n-2))", le(alpha, amax));
                    if tau < 3.0 {
                        c.check(
                            "alpha <= (n(p+1)-2p)/(3-tau) (tau < 3)",
                            le(alpha, (n * (p + 1.0) - 2.0 * p) / (3.0 - tau)),
                        );
                    }
                    c.check("(n+alpha)/p - n <= gamma", le((n + alpha) / p - n, gamma));
                    let gmax = edge
                        .min((2.0 - alpha / p) / (tau - 2.0) - 2.0)
                        .min(2.0 / (tau - 1.0) + n / p - 2.0)
                        .min((n + alpha) * (tau - 2.0) / p + n / p - 2.0);
                    c.check(
                        "gamma <= min((n+alpha)(tau-1)/p - 2, (2-alpha/p)/(tau-2) - 2, 2/(tau-1) + n/p - 2, (n+alpha)(tau-2)/p + n/p - 2)",
                        le(gamma, gmax),
                    );
                    c.check("gamma < n/p - 2/(tau-2)", lt(gamma, n / p - 2.0 / (tau - 2.0)));
                }
            }
            witness.insert("q".into(), q);
            witness.insert("q1".into(), q1);
        }
    }
    Ok(RegionReport { admissible: c.violated.is_empty(), witness, violated: c.violated, checked: c.checked })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(c: Corollary, kv: &[(&str, f64)]) -> RegionQuery {
        let mut params = RegionParams::default();
        for (k, v) in kv {
            params.set(k, *v).unwrap();
        }
        RegionQuery { corollary: c, params }
    }

    #[test]
    fn global_i_example() {
        let r =
            check_region(&query(Corollary::GlobalI, &[("n", 3.0), ("p", 3.0), ("tau", 2.5), ("alpha", 0.0)])).unwrap();
        assert!(r.admissible, "{:?}", r.violated);
        assert!((r.witness["gamma"] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn local_i_example() {
        let r = check_region(&query(
            Corollary::LocalI,
            &[("n", 3.0), ("p", 3.0), ("tau", 2.0), ("alpha", 0.0), ("gamma", -0.5)],
        ))
        .unwrap();
        assert!(r.admissible, "{:?}", r.violated);
        assert!((r.witness["beta"] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn heat_i_ordering_violation() {
        let r = check_region(&query(
            Corollary::HeatI,
            &[("n", 1.0), ("p", 2.0), ("q", 2.0), ("alpha", 0.1), ("beta", 0.2), ("gamma", 0.0)],
        ))
        .unwrap();
        assert!(!r.admissible);
        assert!(r.violated.iter().any(|v| v == "beta <= alpha"));
    }

    #[test]
    fn missing_parameter_is_named() {
        let err = check_region(&query(Corollary::LocalII, &[("n", 2.0), ("p", 3.0), ("alpha", 0.0)])).unwrap_err();
        assert_eq!(err, Error::MissingParameter("tau".into()));
    }

    #[test]
    fn closed_form_ap_examples() {
        assert!(is_ap_closed_form(ApKind::Power, 0.0, 0.0, 1.5, 3));
        assert!(!is_ap_closed_form(ApKind::Power, 1.0, 0.0, 2.0, 1));
        assert!(is_ap_closed_form(ApKind::Product, 1.0, -1.0, 2.0, 2));
    }

    #[test]
    fn corollary_names_round_trip() {
        for c in Corollary::ALL {
            assert_eq!(c.name().parse::<Corollary>().unwrap(), c);
        }
    }
}
