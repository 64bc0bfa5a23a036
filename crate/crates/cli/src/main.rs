//! `hhlab`: batch runner for the hhlab-core verifications.
//!
//! Exit codes: 0 success, 1 internal error, 2 rejected input or failed
//! precondition, 3 divergence of a quantity required to be finite.

// Negated comparisons such as `!(p > 1.0)` are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod inputs;
mod output;
mod selftest;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Arg, ArgMatches, Command};

use crate::commands::Run;
use crate::config::{schema, Kind, Params, SUBCOMMANDS};
use crate::error::CliError;
use crate::output::{num, Table};

fn cli() -> Command {
    let mut cmd = Command::new("hhlab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Weighted heat smoothing, sparse domination and Hardy-Henon Picard solvers")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about) in SUBCOMMANDS {
        let mut sub = Command::new(*name).about(*about).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .help("key = value file; flags override its entries"),
        );
        for k in schema(name) {
            let arg = Arg::new(k.name).long(k.name).help(k.help);
            let arg = match k.kind {
                Kind::Bool => arg.num_args(0..=1).default_missing_value("true").value_name("BOOL"),
                // Values such as `-1/6` are not plain negative numbers to clap.
                Kind::Num => arg.value_name("VALUE").allow_hyphen_values(true),
                _ => arg.value_name("VALUE").allow_negative_numbers(true),
            };
            sub = sub.arg(arg);
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn flags(name: &str, m: &ArgMatches) -> BTreeMap<String, String> {
    schema(name)
        .into_iter()
        .filter_map(|k| m.get_one::<String>(k.name).map(|v| (k.name.to_string(), v.clone())))
        .collect()
}

fn self_test() -> Run {
    let mut t = Table::new(vec![], &["module", "case", "pass", "value", "error"]);
    let mut failed = 0;
    for (module, case, check) in selftest::CASES {
        let (pass, value, err) = match check() {
            Ok((pass, v)) => (pass, num(v), String::new()),
            Err(e) => (false, String::new(), e.to_string()),
        };
        failed += usize::from(!pass);
        t.push(vec![module.to_string(), case.to_string(), pass.to_string(), value, err]);
    }
    eprintln!("self-test: {} of {} cases passed", t.len() - failed, t.len());
    Run { table: t, divergence: None, failures: failed }
}

fn dispatch(name: &str, p: &mut Params) -> Result<Run, CliError> {
    match name {
        "check-region" => commands::check_region(p),
        "weight-constants" => commands::weight_constants(p),
        "theorem-constants" => commands::theorem(p),
        "verify-domination" => commands::domination(p),
        "verify-smoothing" => commands::smoothing(p),
        "solve-local" => commands::solve_local(p),
        "solve-global" => commands::solve_global(p),
        "self-test" => Ok(self_test()),
        other => unreachable!("unknown subcommand {other}"),
    }
}

fn write_table(t: &Table, out: Option<&str>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            t.write(&mut f)?;
            f.flush()?;
        }
        None => t.write(&mut std::io::stdout().lock())?,
    }
    Ok(())
}

fn run(name: &str, m: &ArgMatches) -> Result<i32, CliError> {
    let mut p = Params::resolve(name, m.get_one::<PathBuf>("config").map(PathBuf::as_path), flags(name, m))?;
    if let Some(threads) = p.opt_int("threads") {
        let threads = usize::try_from(threads).ok().filter(|&t| t > 0);
        let threads = threads.ok_or_else(|| CliError::Config("threads must be positive".into()))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let start = Instant::now();
    let mut r = dispatch(name, &mut p)?;
    if p.flag("timings") {
        r.table.add_constant_column("seconds", num(start.elapsed().as_secs_f64()));
    }
    let out = if p.has("out") { Some(p.text("out")?.to_string()) } else { None };
    write_table(&r.table, out.as_deref())?;
    if r.failures > 0 {
        eprintln!("error: {} check(s) failed", r.failures);
        return Ok(1);
    }
    if let Some(msg) = r.divergence {
        eprintln!("divergence: {msg}");
        return Ok(3);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let code = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(name, sub))) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => 1,
    };
    ExitCode::from(code as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_builds() {
        cli().debug_assert();
    }
}
