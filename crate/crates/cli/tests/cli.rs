use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn graphnls(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphnls")).args(args).arg("--out").arg(out).output().expect("spawn graphnls")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("JSON on stderr")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Rows of a versioned CSV as maps from column to field.
fn read_csv(path: &Path, header: &str) -> Vec<std::collections::HashMap<String, String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let (first, rest) = text.split_once('\n').unwrap();
    assert_eq!(first, header);
    let mut r = csv::Reader::from_reader(rest.as_bytes());
    let cols: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records().map(|rec| cols.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect()).collect()
}

#[test]
fn check_reports_the_comb() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphnls(&["check", "--spec", "comb"], dir.path());
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["terminal"], true);
    assert_eq!(v["H"], false);
    assert!((v["tilde_mu"].as_f64().unwrap() - 1.360350).abs() < 1e-6);
    let grid = stdout_json(&graphnls(&["check", "--spec", "square_grid"], dir.path()));
    assert_eq!(grid["terminal"], false);
    assert_eq!(grid["H"], true);
}

#[test]
fn supercritical_line_solve_blows_up() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphnls(&["solve", "--spec", "line", "--p", "6", "--alpha", "0", "--mu", "3.0", "--emit-svg"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("solve.json"));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["classification"], "blowup");
    let csv = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("# graphnls function v1"));
    let svg = std::fs::read_to_string(dir.path().join("solution.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn errors_are_json_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], i32, &str); 6] = [
        (&["solve", "--spec", "no_such_spec", "--p", "6", "--mu", "1"], 3, "spec"),
        (&["solve", "--spec", "line", "--p", "6", "--mu", "-1"], 2, "config"),
        (&["solve", "--spec", "line", "--p", "7", "--mu", "1"], 2, "config"),
        (&["solve", "--spec", "line", "--p", "5", "--alpha", "1", "--mu", "1"], 2, "config"),
        (&["solve", "--spec", "line", "--mu", "1", "--bogus"], 2, "config"),
        (&["sweep", "--spec", "line", "--p", "5", "--mu-range", "2:1:0.5"], 2, "config"),
    ];
    for (args, code, kind) in cases {
        let o = graphnls(args, dir.path());
        assert_eq!(o.status.code(), Some(code), "{args:?}");
        let e = stderr_json(&o);
        assert_eq!(e["error"], kind, "{args:?}");
        assert_eq!(e["exit_code"], code);
        assert!(e["message"].as_str().is_some_and(|m| !m.is_empty()));
    }

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"spec": "line", "vertices": []}"#).unwrap();
    let o = graphnls(&["check", "--spec", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "spec");

    let o = Command::new(env!("CARGO_BIN_EXE_graphnls"))
        .args(["check", "--spec", "comb"])
        .env("GRAPHNLS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn iteration_limit_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    std::fs::write(&cfg, r#"{"spec": "ladder", "p": 4, "mu": 3, "n": 8, "h": 0.1}"#).unwrap();
    // There is no flag for the iteration cap; an unreachable tolerance
    // exhausts it instead.
    let o = graphnls(&["--config", cfg.to_str().unwrap(), "gn", "--kind", "gn1d", "--restarts", "1", "--tol", "1e-300"], dir.path());
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stderr_json(&o)["error"], "maxiter");
    assert!(dir.path().join("gn.json").exists());
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    std::fs::write(&cfg, r#"{"spec": "line", "p": 6, "alpha": 0, "mu": 2.0, "h": 0.1}"#).unwrap();
    let o = graphnls(&["solve", "--config", cfg.to_str().unwrap(), "--mu", "3.0"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("solve.json"));
    assert_eq!(v["params"]["mu"], 3.0);
    assert_eq!(v["options"]["h"], 0.1);
    assert_eq!(v["result"]["classification"], "blowup");

    std::fs::write(&cfg, r#"{"spec": "line", "colour": "red"}"#).unwrap();
    let o = graphnls(&["check", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["solve", "--spec", "ladder", "--p", "4", "--mu", "3", "--n", "4", "--h", "0.1", "--seed", "11"];
    for d in [&a, &b] {
        assert!(graphnls(&args, d.path()).status.success());
    }
    for file in ["solve.json", "solution.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
    let v = read_json(&a.path().join("solve.json"));
    assert_eq!(v["result"]["classification"], "converged");
    assert_eq!(v["result"]["provenance"]["seed"], 11);
}

#[test]
fn sweep_does_not_depend_on_the_thread_count() {
    let args = [
        "sweep", "--spec", "ladder", "--p", "4", "--q", "3", "--mu-range", "0.5,1,2", "--alpha-range", "-0.5:0.5:0.5", "--n", "4",
        "--h", "0.1", "--seed", "3",
    ];
    let run = |threads: &str| {
        let d = tempfile::tempdir().unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_graphnls"))
            .args(args)
            .arg("--out")
            .arg(d.path())
            .env("GRAPHNLS_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(d.path().join("sweep.csv")).unwrap()
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("sweep.csv"), &one).unwrap();
    let rows = read_csv(&d.path().join("sweep.csv"), "# graphnls sweep v1");
    assert_eq!(rows.len(), 9);
    let seeds: Vec<u64> = rows.iter().map(|r| r["seed"].parse().unwrap()).collect();
    assert_eq!(seeds, (3..12).collect::<Vec<_>>());
    assert_eq!(rows[0]["mu"], "0.5");
    assert_eq!(rows[0]["alpha"], "-0.5");
}

/// Grid sweep in μ at fixed α; returns the regimes in order.
fn grid_sweep(range: &str, out: &Path) -> Vec<String> {
    let args = ["sweep", "--spec", "square_grid", "--p", "5", "--q", "4", "--alpha", "1", "--mu-range", range, "--n", "4", "--h", "0.25"];
    let o = graphnls(&args, out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    read_csv(&out.join("sweep.csv"), "# graphnls sweep v1").into_iter().map(|r| r["regime"].clone()).collect()
}

fn sign_changes(regimes: &[String]) -> Vec<usize> {
    (1..regimes.len()).filter(|&i| regimes[i] != regimes[i - 1]).collect()
}

#[test]
fn grid_sweep_changes_sign_once_at_the_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphnls(
        &["threshold", "--target", "mu-crit", "--spec", "square_grid", "--p", "5", "--q", "4", "--alpha", "1", "--n", "4", "--h", "0.25"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_json(&dir.path().join("threshold.json"));
    let bracket: Vec<f64> = t["bracket"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let mu_bar = t["analytic"]["mu_bar"].as_f64().unwrap();

    // The sweep from 0.2 to 2.0 stays below the analytic lower bound, so the
    // level is zero throughout.
    assert!(mu_bar > 2.0, "{mu_bar}");
    let low = grid_sweep("0.2:2.0:0.2", dir.path());
    assert_eq!(low.len(), 10);
    assert!(low.iter().all(|r| r == "zero_level_vanishing"), "{low:?}");

    let mus: Vec<f64> = (0..10).map(|i| 2.8 + 0.2 * i as f64).collect();
    let wide = grid_sweep("2.8:4.6:0.2", dir.path());
    let flips = sign_changes(&wide);
    assert_eq!(flips.len(), 1, "{wide:?}");
    let i = flips[0];
    assert_eq!(wide[i], "negative_energy_ground_state");
    // The flip brackets the threshold estimate up to the sweep step.
    assert!(mus[i - 1] <= bracket[1] && mus[i] >= bracket[0], "{bracket:?} vs {} .. {}", mus[i - 1], mus[i]);
}

#[test]
fn gn_writes_a_report_and_maximizer() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphnls(&["gn", "--spec", "line", "--kind", "gn1d", "--p", "6", "--n", "4", "--h", "0.1", "--restarts", "1"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("gn.json"));
    assert_eq!(v["schema_version"], 1);
    let c = v["constant"].as_f64().unwrap();
    assert!(c > 0.3 && c <= 4.0 / std::f64::consts::PI.powi(2) * 1.001, "{c}");
    assert!(dir.path().join("maximizer.csv").exists());
}

#[test]
fn threshold_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = graphnls(
        &["threshold", "--target", "alpha-bar", "--spec", "square_grid", "--p", "5", "--q", "4.5", "--mu", "0.5", "--n", "4", "--h", "0.1"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("threshold.json"));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["estimate"], 0.0);
    assert_eq!(v["status"], "ok");
}

#[test]
fn competitor_tables() {
    let dir = tempfile::tempdir().unwrap();
    let table = |kind: &str, extra: &[&str]| {
        let mut args = vec!["competitor", "--kind", kind, "--p", "6", "--mu", "1"];
        args.extend_from_slice(extra);
        let o = graphnls(&args, dir.path());
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        read_csv(&dir.path().join("energies.csv"), "# graphnls energies v1")
    };
    let f = |r: &std::collections::HashMap<String, String>, k: &str| r[k].parse::<f64>().unwrap();

    // Tent energies fall with the radius as the kinetic term spreads out.
    let tents = table("tent", &["--spec", "square_grid", "--n", "3", "--h", "0.1"]);
    assert_eq!(tents.len(), 3);
    assert!(tents.windows(2).all(|w| f(&w[1], "energy") < f(&w[0], "energy")));
    let f0 = std::fs::read_to_string(dir.path().join("competitor.csv")).unwrap();
    assert!(f0.starts_with("# graphnls function v1"));

    // Above the line critical mass edge solitons run off to −∞.
    let mu = (1.2 * 2.720_699_046_351_326_5).to_string();
    let mut args = vec!["competitor", "--kind", "edge-soliton", "--spec", "ladder", "--p", "6", "--mu", &mu];
    args.extend_from_slice(&["--lambdas", "1,4,16"]);
    assert!(graphnls(&args, dir.path()).status.success());
    let edge = read_csv(&dir.path().join("energies.csv"), "# graphnls energies v1");
    assert!(edge.windows(2).all(|w| f(&w[1], "energy") < f(&w[0], "energy")), "{edge:?}");

    // Sextic solitons all carry the same mass and zero energy.
    let sol = table("soliton", &["--lambdas", "1,4"]);
    for r in &sol {
        assert!((f(r, "mass") - 2.720_699_046_351_326_5).abs() < 1e-9);
        // The discretization error scales with the frequency like the energy terms.
        assert!(f(r, "energy").abs() < 1e-4 * f(r, "lambda"), "{r:?}");
    }
}
