//! Flat `key = value` experiment configs and their per-subcommand schemas.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Num,
    Int,
    Text,
    Bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: Option<&'static str>, help: &'static str) -> Key {
    Key { name, kind, default, help }
}

use Kind::*;

/// Keys accepted by every subcommand. Only `seed` is echoed into the CSV.
pub const COMMON: &[Key] = &[
    key("out", Text, None, "CSV output path (stdout when absent)"),
    key("threads", Int, None, "cap on worker threads"),
    key("seed", Int, Some("0"), "seed for field=random"),
    key("timings", Bool, Some("false"), "append a wall-clock seconds column"),
];

const NOT_ECHOED: &[&str] = &["out", "threads", "timings"];

const REGION: &[Key] = &[
    key("case", Text, None, "HEAT_I..HEAT_IV, LOCAL_I..LOCAL_IV, GLOBAL_I..GLOBAL_IV"),
    key("n", Num, None, "dimension"),
    key("p", Num, None, "exponent p"),
    key("q", Num, None, "exponent q"),
    key("q1", Num, None, "exponent q1"),
    key("tau", Num, None, "nonlinearity exponent"),
    key("alpha", Num, None, "weight exponent alpha"),
    key("beta", Num, None, "weight exponent beta"),
    key("gamma", Num, None, "smoothing exponent gamma"),
];

const SCAN: &[Key] = &[
    key("level_min", Int, None, "coarsest scan level (side 2^-level)"),
    key("level_max", Int, None, "finest scan level"),
    key("shifts", Text, Some("all"), "all (3^n shifted grids) or standard"),
    key("tol", Num, Some("1e-9"), "relative tolerance of cube integrals"),
    key("growth", Num, Some("1.25"), "doubling growth factor that flags divergence"),
];

const WEIGHT_CONSTANTS: &[Key] = &[
    key("n", Int, Some("1"), "dimension"),
    key("kind", Text, Some("power"), "one | constant | power | bracket | product"),
    key("alpha", Num, Some("0"), "power/bracket exponent; bracket exponent for product"),
    key("beta", Num, Some("0"), "|x| exponent for product"),
    key("c", Num, Some("1"), "value for kind=constant"),
    key("p", Num, Some("2"), "A_p exponent (inf for A_inf by exp-log)"),
    key("L", Num, Some("1"), "halfwidth of the box the scan cubes must meet"),
    key("ainf_depth", Int, Some("3"), "inner levels of the Fujii-Wilson scan; 0 skips it"),
];

const FIELD: &[Key] = &[
    key("n", Int, Some("1"), "dimension"),
    key("L", Num, Some("16"), "box halfwidth"),
    key("N", Int, Some("512"), "cells per axis"),
    key("field", Text, Some("bump"), "bump | gaussian | indicator | random | file"),
    key("field_path", Text, None, "whitespace-separated cell values for field=file"),
    key("amp", Num, Some("1"), "field amplitude"),
    key("width", Num, Some("1"), "bump radius, Gaussian variance, indicator side"),
];

const TIMES: &[Key] = &[
    key("t_min", Num, Some("1e-2"), "first time"),
    key("t_max", Num, Some("1"), "last time"),
    key("t_count", Int, Some("9"), "log-spaced time count"),
    key("tail_tol", Num, Some("1e-12"), "Gaussian tail mass dropped"),
];

const DOMINATION: &[Key] = &[
    key("gamma", Num, Some("0.5"), "fractional order of the sparse operator"),
    key("lambda", Num, None, "stopping threshold (default 2^(n+1))"),
    key("geometric", Bool, Some("false"), "also measure the geometric constant"),
];

const SMOOTHING: &[Key] = &[
    key("p", Num, Some("2"), "input exponent"),
    key("q", Num, Some("2"), "output exponent"),
    key("gamma", Num, Some("0"), "time-weight exponent"),
    key("form", Text, Some("weighted"), "weighted (L^q(w) output) or sup"),
];

const THEOREM: &[Key] = &[
    key("mode", Text, Some("local"), "local (W) or global (W1, W2, W3)"),
    key("n", Int, Some("1"), "dimension"),
    key("p", Num, Some("3"), "exponent p"),
    key("tau", Num, Some("2"), "nonlinearity exponent"),
    key("beta", Num, Some("0.5"), "local time exponent"),
    key("q", Num, Some("4"), "global exponent q"),
    key("q1", Num, Some("4"), "global exponent q1"),
    key("alpha", Num, Some("0"), "global time exponent"),
    key("L", Num, Some("1"), "halfwidth of the box the scan cubes must meet"),
];

const SOLVER: &[Key] = &[
    key("p", Num, Some("3"), "exponent p"),
    key("tau", Num, Some("2"), "nonlinearity exponent"),
    key("nonlinearity", Text, Some("signed_power"), "signed_power (|u|^(tau-1)u) or power (u^tau)"),
    key("steps", Int, Some("32"), "time steps"),
    key("tol_fp", Num, Some("1e-10"), "fixed-point tolerance"),
    key("max_iter", Int, Some("60"), "Picard iteration cap"),
    key("tail_tol", Num, Some("1e-12"), "Gaussian tail mass dropped"),
    key("coarse_tol", Num, Some("1e-2"), "step indicator bound before the grid is rejected"),
    key("check", Bool, Some("false"), "check weight hypotheses and constants on a scan (always on for solve-global)"),
    key("scan_L", Num, Some("2"), "halfwidth of the box the hypothesis scan must meet"),
    key("level_min", Int, Some("0"), "coarsest hypothesis scan level"),
    key("level_max", Int, Some("1"), "finest hypothesis scan level"),
    key("shifts", Text, Some("standard"), "all or standard"),
    key("growth", Num, Some("1.25"), "doubling growth factor that flags divergence"),
];

const LOCAL: &[Key] = &[
    key("beta", Num, Some("0.5"), "time exponent of the weight hypothesis"),
    key("T", Num, Some("0.5"), "requested existence time"),
    key("halvings", Int, Some("4"), "retries with T/2 when the map does not contract"),
];

const GLOBAL: &[Key] = &[
    key("q", Num, Some("4"), "exponent q"),
    key("q1", Num, Some("4"), "exponent q1"),
    key("alpha", Num, Some("0.5"), "time exponent"),
    key("t_max", Num, Some("4"), "horizon"),
    key("decay_lo", Num, None, "decay fit window start (default t_max/10)"),
    key("decay_hi", Num, None, "decay fit window end (default t_max)"),
];

macro_rules! weight_keys {
    ($prefix:literal, $kind:literal, $alpha:literal) => {
        [
            key(concat!($prefix, "_kind"), Text, Some($kind), "one | constant | power | bracket | product"),
            key(concat!($prefix, "_alpha"), Num, Some($alpha), "power/bracket exponent; bracket exponent for product"),
            key(concat!($prefix, "_beta"), Num, Some("0"), "|x| exponent for product"),
            key(concat!($prefix, "_c"), Num, Some("1"), "value for kind=constant"),
        ]
    };
}

const SIGMA_ONE: &[Key] = &weight_keys!("sigma", "one", "0");
const W_ONE: &[Key] = &weight_keys!("w", "one", "0");
const V_POWER: &[Key] = &weight_keys!("v", "power", "-1/6");

pub const SUBCOMMANDS: &[(&str, &str)] = &[
    ("check-region", "Closed-form admissibility of an exponent tuple"),
    ("weight-constants", "A_p and Fujii-Wilson A_inf constants of a weight"),
    ("theorem-constants", "Two-weight constants W (local) or W1, W2, W3 (global)"),
    ("verify-domination", "Heat flow against the sparse fractional sum"),
    ("verify-smoothing", "Weighted heat smoothing ratios against the two-weight bound"),
    ("solve-local", "Picard iteration on [0, T]"),
    ("solve-global", "Picard iteration for small data with decay fit"),
    ("self-test", "Run the built-in trivial cases"),
];

/// Schema of a subcommand, common keys last.
pub fn schema(cmd: &str) -> Vec<Key> {
    let mut keys: Vec<Key> = match cmd {
        "check-region" => REGION.to_vec(),
        "weight-constants" => [WEIGHT_CONSTANTS, SCAN].concat(),
        "theorem-constants" => [THEOREM, SIGMA_ONE, V_POWER, SCAN].concat(),
        "verify-domination" => [FIELD, DOMINATION, TIMES, SCAN].concat(),
        "verify-smoothing" => [FIELD, SMOOTHING, SIGMA_ONE, W_ONE, TIMES, SCAN].concat(),
        "solve-local" | "solve-global" => {
            let tail = if cmd == "solve-local" { LOCAL } else { GLOBAL };
            [FIELD, SOLVER, SIGMA_ONE, V_POWER, tail].concat()
        }
        "self-test" => vec![],
        _ => vec![],
    };
    // Later duplicates (e.g. a SOLVER default overriding FIELD) replace earlier ones.
    let mut out: Vec<Key> = Vec::new();
    for k in keys.drain(..) {
        match out.iter_mut().find(|o| o.name == k.name) {
            Some(slot) => *slot = k,
            None => out.push(k),
        }
    }
    out.extend_from_slice(COMMON);
    out
}

/// Parses a config document. `subcommand`, when present, must name `cmd`.
pub fn parse_file(text: &str, cmd: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k == "subcommand" {
            if v != cmd {
                return Err(CliError::Config(format!("config is for {v:?}, not {cmd:?}")));
            }
            continue;
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key {k:?}", lineno + 1)));
        }
    }
    Ok(out)
}

/// Parses a number, accepting `a/b` fractions and `inf`.
pub fn parse_num(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0.0).then(|| a / b);
    }
    s.parse().ok()
}

/// Validated parameter set of one run.
#[derive(Debug, Clone)]
pub struct Params {
    keys: Vec<Key>,
    values: BTreeMap<String, String>,
    derived: BTreeMap<String, String>,
}

impl Params {
    /// File values first, then flags on top; every key is checked against
    /// the schema and type-checked before anything runs.
    pub fn resolve(cmd: &str, file: Option<&Path>, flags: BTreeMap<String, String>) -> Result<Self, CliError> {
        let keys = schema(cmd);
        let mut values = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                parse_file(&text, cmd)?
            }
            None => BTreeMap::new(),
        };
        values.extend(flags);
        for (k, v) in &values {
            let spec = keys
                .iter()
                .find(|s| s.name == k)
                .ok_or_else(|| CliError::Config(format!("unknown key {k:?} for {cmd}")))?;
            let ok = match spec.kind {
                Num => parse_num(v).is_some(),
                Int => v.parse::<i64>().is_ok(),
                Bool => matches!(v.as_str(), "true" | "false"),
                Text => true,
            };
            if !ok {
                return Err(CliError::Config(format!("bad value {v:?} for {k}")));
            }
        }
        Ok(Self { keys, values, derived: BTreeMap::new() })
    }

    fn raw(&self, k: &str) -> Option<&str> {
        if let Some(v) = self.values.get(k) {
            return Some(v);
        }
        self.keys.iter().find(|s| s.name == k).and_then(|s| s.default)
    }

    pub fn has(&self, k: &str) -> bool {
        self.raw(k).is_some()
    }

    pub fn opt_num(&self, k: &str) -> Option<f64> {
        self.raw(k).and_then(parse_num)
    }

    pub fn num(&self, k: &str) -> Result<f64, CliError> {
        self.opt_num(k).ok_or_else(|| CliError::Config(format!("missing parameter {k}")))
    }

    pub fn opt_int(&self, k: &str) -> Option<i64> {
        self.raw(k).and_then(|v| v.parse().ok())
    }

    pub fn int(&self, k: &str) -> Result<i64, CliError> {
        self.opt_int(k).ok_or_else(|| CliError::Config(format!("missing parameter {k}")))
    }

    pub fn count(&self, k: &str) -> Result<usize, CliError> {
        usize::try_from(self.int(k)?).map_err(|_| CliError::Config(format!("{k} must be nonnegative")))
    }

    pub fn text(&self, k: &str) -> Result<&str, CliError> {
        self.raw(k).ok_or_else(|| CliError::Config(format!("missing parameter {k}")))
    }

    pub fn flag(&self, k: &str) -> bool {
        self.raw(k) == Some("true")
    }

    /// Records the value actually used for a key left to its automatic default.
    pub fn set_derived(&mut self, k: &str, v: String) {
        if self.raw(k).is_none() {
            self.derived.insert(k.to_string(), v);
        }
    }

    /// `(key, value)` pairs for the parameter echo, in schema order.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.keys
            .iter()
            .filter(|k| !NOT_ECHOED.contains(&k.name))
            .map(|k| {
                let v = self.raw(k.name).or_else(|| self.derived.get(k.name).map(String::as_str));
                (k.name.to_string(), v.unwrap_or("").to_string())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing() {
        let m = parse_file("# c\nsubcommand = solve-local\n p = 3 # trailing\n\ntau=5/2\n", "solve-local").unwrap();
        assert_eq!(m["p"], "3");
        assert_eq!(parse_num(&m["tau"]), Some(2.5));
        assert!(parse_file("p 3", "x").is_err());
        assert!(parse_file("p=1\np=2", "x").is_err());
        assert!(parse_file("subcommand = a", "b").is_err());
    }

    #[test]
    fn schemas_have_unique_keys() {
        for (cmd, _) in SUBCOMMANDS {
            let keys = schema(cmd);
            for (i, k) in keys.iter().enumerate() {
                assert!(keys[..i].iter().all(|o| o.name != k.name), "{cmd}: {}", k.name);
            }
        }
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_num("-1/6"), Some(-1.0 / 6.0));
        assert_eq!(parse_num("inf"), Some(f64::INFINITY));
        assert_eq!(parse_num("1/0"), None);
        assert_eq!(parse_num("x"), None);
    }
}
