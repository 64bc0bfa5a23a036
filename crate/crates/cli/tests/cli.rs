use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

fn hhlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hhlab")).args(args).output().unwrap()
}

fn split(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                chars.next();
                out.last_mut().unwrap().push('"');
            }
            ('"', _) => quoted = !quoted,
            (',', false) => out.push(String::new()),
            _ => out.last_mut().unwrap().push(c),
        }
    }
    out
}

/// Rows keyed by header name.
fn rows(csv: &str) -> Vec<HashMap<String, String>> {
    let mut lines = csv.lines();
    let header = split(lines.next().expect("header"));
    lines
        .map(|l| {
            let cells = split(l);
            assert_eq!(cells.len(), header.len(), "{l}");
            header.iter().cloned().zip(cells).collect()
        })
        .collect()
}

fn stdout_rows(o: &Output) -> Vec<HashMap<String, String>> {
    rows(&String::from_utf8(o.stdout.clone()).unwrap())
}

#[test]
fn region_example() {
    let o = hhlab(&["check-region", "--case", "GLOBAL_I", "--n", "3", "--p", "3", "--tau", "2.5", "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_rows(&o);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["admissible"], "true");
    assert_eq!(r[0]["derived_gamma"].parse::<f64>().unwrap(), -0.5);
    assert_eq!((r[0]["case"].as_str(), r[0]["tau"].as_str(), r[0]["gamma"].as_str()), ("GLOBAL_I", "2.5", ""));
}

#[test]
fn rejected_region_is_still_a_successful_run() {
    let o = hhlab(&["check-region", "--case", "GLOBAL_I", "--n", "3", "--p", "3", "--tau", "3", "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_rows(&o);
    assert_eq!(r[0]["admissible"], "false");
    assert!(!r[0]["violated"].is_empty());
}

#[test]
fn divergent_weight_exits_3() {
    let o = hhlab(&["weight-constants", "--kind", "power", "--alpha", "2", "--p", "2", "--n", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let r = stdout_rows(&o);
    assert_eq!(r[0]["ap_divergent"], "true");
    assert_eq!(r[0]["ap_closed_form"], "false");
}

#[test]
fn admissible_weight_is_finite() {
    let o = hhlab(&["weight-constants", "--kind", "power", "--alpha", "-1/2", "--p", "2", "--ainf_depth", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_rows(&o);
    assert_eq!(r[0]["alpha"], "-1/2");
    assert_eq!(r[0]["ap_divergent"], "false");
    assert_eq!(r[0]["ap_closed_form"], "true");
    assert!(r[0]["ap_value"].parse::<f64>().unwrap().is_finite());
}

#[test]
fn self_test_passes() {
    let o = hhlab(&["self-test"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = stdout_rows(&o);
    assert!(r.len() >= 40);
    for m in ["grid", "weights", "sparse", "heat", "hh_solver"] {
        assert!(r.iter().any(|row| row["module"] == m));
    }
    assert!(r.iter().all(|row| row["pass"] == "true"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.cfg",
        "# smoothing run\nsubcommand = verify-smoothing\np = 3/2\nq = 2\ngamma = 1/3\nt_count = 3\nN = 256\n",
    );
    let out = dir.path().join("out.csv");
    let o = hhlab(&["verify-smoothing", "--config", &cfg, "--q", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(r.len(), 3);
    for row in &r {
        assert_eq!((row["p"].as_str(), row["q"].as_str(), row["N"].as_str()), ("3/2", "3", "256"));
        assert_eq!(row["level_min"], r[0]["level_min"]);
        assert!(!row["level_min"].is_empty());
    }
}

#[test]
fn unknown_and_malformed_keys_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write(dir.path(), "a.cfg", "p = 2\nbogus = 1\n");
    assert_eq!(hhlab(&["verify-smoothing", "--config", &bad_key]).status.code(), Some(2));
    let bad_value = write(dir.path(), "b.cfg", "p = two\n");
    assert_eq!(hhlab(&["verify-smoothing", "--config", &bad_value]).status.code(), Some(2));
    let other_cmd = write(dir.path(), "c.cfg", "subcommand = solve-local\n");
    assert_eq!(hhlab(&["verify-smoothing", "--config", &other_cmd]).status.code(), Some(2));
    assert_eq!(hhlab(&["verify-smoothing", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(hhlab(&["check-region", "--case", "NOPE"]).status.code(), Some(2));
}

#[test]
fn precondition_failure_exits_2() {
    // p > q is outside the smoothing range.
    let o = hhlab(&["verify-smoothing", "--p", "3", "--q", "2", "--t_count", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exponent"));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = hhlab(&[
            "verify-domination",
            "--field",
            "random",
            "--seed",
            "7",
            "--t_count",
            "4",
            "--threads",
            "2",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let r = rows(std::str::from_utf8(&a).unwrap());
    assert!(r.iter().all(|row| row["seed"] == "7" && row["lambda"] == r[0]["lambda"]));
    let ratio = &r[0]["ratio"];
    let mantissa = ratio.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{ratio}");
}

#[test]
fn timings_add_a_column() {
    let o = hhlab(&[
        "check-region",
        "--case",
        "HEAT_I",
        "--n",
        "1",
        "--p",
        "2",
        "--q",
        "2",
        "--alpha",
        "1/4",
        "--beta",
        "1/4",
        "--gamma",
        "0",
        "--timings",
    ]);
    let r = stdout_rows(&o);
    assert!(r[0]["seconds"].parse::<f64>().unwrap() >= 0.0);
}

#[test]
fn field_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<String> = (0..64).map(|i| if (28..36).contains(&i) { "1" } else { "0" }.to_string()).collect();
    let path = write(dir.path(), "f.txt", &values.join("\n"));
    let o = hhlab(&[
        "verify-domination",
        "--field",
        "file",
        "--field_path",
        &path,
        "--L",
        "4",
        "--N",
        "64",
        "--t_count",
        "2",
        "--t_max",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let short = write(dir.path(), "g.txt", "1 2 3");
    let o = hhlab(&["verify-domination", "--field", "file", "--field_path", &short, "--L", "4", "--N", "64"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn local_solve_reports_trajectory() {
    let o = hhlab(&["solve-local", "--amp", "0.5", "--steps", "16", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_rows(&o);
    assert_eq!(r.len(), 17);
    assert!(r.iter().all(|row| row["converged"] == "true" && row["W_divergent"] == "false"));
    assert_eq!(r[16]["t"].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn local_solve_without_contraction_exits_3() {
    let o = hhlab(&[
        "solve-local",
        "--amp",
        "300",
        "--T",
        "2",
        "--halvings",
        "1",
        "--max_iter",
        "15",
        "--coarse_tol",
        "inf",
        "--v_kind",
        "constant",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn global_solve_fits_free_decay() {
    let o = hhlab(&[
        "solve-global",
        "--p",
        "2",
        "--tau",
        "3.5",
        "--v_kind",
        "constant",
        "--v_c",
        "0",
        "--L",
        "64",
        "--N",
        "2048",
        "--t_max",
        "40",
        "--steps",
        "40",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_rows(&o);
    let slope: f64 = r[0]["decay_slope"].parse().unwrap();
    assert!((slope + 0.5).abs() < 0.05, "{slope}");
    assert_eq!(r[0]["decay_lo"].parse::<f64>().unwrap(), 4.0);
}

#[test]
fn oversized_global_datum_exits_2() {
    let o = hhlab(&["solve-global", "--p", "2", "--tau", "3.5", "--v_alpha", "-1/4", "--amp", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));
}

#[test]
fn theorem_constants_rows() {
    let o = hhlab(&["theorem-constants", "--mode", "global", "--p", "2", "--tau", "3.5", "--alpha", "1/2"]);
    let r = stdout_rows(&o);
    let names: Vec<&str> = r.iter().map(|row| row["constant"].as_str()).collect();
    assert_eq!(names, ["W1", "W2", "W3"]);
    let any_divergent = r.iter().any(|row| row["divergent"] == "true");
    assert_eq!(o.status.code(), Some(if any_divergent { 3 } else { 0 }));
}
