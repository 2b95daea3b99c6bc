use std::path::Path;
use std::process::{Command, Output};

use nonnormal::io::{parse_esd_csv, parse_grid_csv};
use nonnormal::C64;

const WILKINSON: &str =
    r#"{"generators":[{"kind":"affine","intercept":-1,"slope":2},{"kind":"constant","value":1}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonnormal"))
        .args(args)
        .env_remove(nonnormal_cli::OUT_ENV)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn simulate_toeplitz_writes_one_row_per_eigenvalue() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("s");
    ok(&[
        "simulate", "--out", out.to_str().unwrap(), "--model", "toeplitz", "--coefficients", "[0,1,1]",
        "--n", "1000", "--gamma", "2",
    ]);
    let pts = parse_esd_csv(&read(&out.join("esd_seed1.csv"))).unwrap();
    assert_eq!(pts.len(), 1000);
    let meta: serde_json::Value = serde_json::from_str(&read(&out.join("metadata.json"))).unwrap();
    assert_eq!(meta["command"], "simulate");
    assert_eq!(meta["config"]["n"], 1000);
}

#[test]
fn tiny_simulation_runs() {
    let t = tempfile::tempdir().unwrap();
    ok(&["simulate", "--out", t.path().to_str().unwrap(), "--model", "jordan", "--z", "0.5", "--n", "2"]);
    assert_eq!(parse_esd_csv(&read(&t.path().join("esd_seed1.csv"))).unwrap().len(), 2);
}

#[test]
fn small_gamma_is_a_usage_error() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--out", t.path().to_str().unwrap(), "--model", "jordan", "--z", "0.5", "--n", "4", "--gamma", "0.4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma"));
}

#[test]
fn unknown_subcommand_and_keys_are_usage_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--model", "jordan", "--n", "4", "--z", "1", "--colour", "red"]).status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let t = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nonnormal"))
        .args(["predict", "--model", "jordan", "--z", "0.5", "--n", "10", "--samples", "3"])
        .env(nonnormal_cli::OUT_ENV, t.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(t.path().join("predicted_logpot.csv").exists());
}

#[test]
fn outputs_are_identical_across_runs_and_thread_counts() {
    let t = tempfile::tempdir().unwrap();
    let dir = |k: &str| t.path().join(k);
    let common = ["--model", "bidiagonal-iid", "--law", r#"{"kind":"uniform_interval","lo":-2,"hi":2}"#, "--n", "60", "--seeds", "[3,4,5]"];
    for (k, threads) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let out = dir(k);
        let mut args = vec!["--threads", threads, "simulate", "--out", out.to_str().unwrap()];
        args.extend(common);
        ok(&args);
    }
    for seed in [3, 4, 5] {
        let name = format!("esd_seed{seed}.csv");
        let a = read(&dir("a").join(&name));
        assert_eq!(a, read(&dir("b").join(&name)));
        assert_eq!(a, read(&dir("c").join(&name)));
    }
}

#[test]
fn resolved_config_reruns_the_experiment() {
    let t = tempfile::tempdir().unwrap();
    let first = t.path().join("first");
    let second = t.path().join("second");
    ok(&["detequiv", "--out", first.to_str().unwrap(), "--model", "toeplitz", "--coefficients", "[0,1,1]", "--n", "40",
        "--seeds", "[1,2]", "--test-points", r#"{"kind":"points","points":[[3,1]]}"#]);
    let cfg = first.join("config.json");
    ok(&["detequiv", "--config", cfg.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(read(&first.join("detequiv_z0.csv")), read(&second.join("detequiv_z0.csv")));
}

#[test]
fn pseudospectrum_grid_has_declared_shape() {
    let t = tempfile::tempdir().unwrap();
    ok(&["pseudospec", "--out", t.path().to_str().unwrap(), "--model", "twisted", "--symbol", WILKINSON, "--n", "100",
        "--grid", r#"{"x_min":-2,"x_max":2,"y_min":-1.5,"y_max":1.5,"nx":9,"ny":7}"#]);
    let g = parse_grid_csv(&read(&t.path().join("pseudospectrum.csv"))).unwrap();
    assert_eq!((g.spec.nx, g.spec.ny, g.values.len()), (9, 7, 63));
    assert!(g.values.iter().all(|v| v.is_finite() && *v >= 0.0));
}

fn logpot_rows(text: &str) -> Vec<(C64, f64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (C64::new(v[0], v[1]), v[2])
        })
        .collect()
}

#[test]
fn predict_constant_symbol_is_log_modulus_outside() {
    let t = tempfile::tempdir().unwrap();
    ok(&["predict", "--out", t.path().to_str().unwrap(), "--model", "toeplitz", "--coefficients", "[0,1]", "--n", "10",
        "--samples", "100"]);
    for (z, v) in logpot_rows(&read(&t.path().join("predicted_logpot.csv"))) {
        assert!((v - z.norm().ln()).abs() < 1e-12);
    }
    let law = parse_esd_csv(&read(&t.path().join("predicted_law.csv"))).unwrap();
    assert!(law.iter().all(|w| (w.norm() - 1.0).abs() < 1e-12));
}

#[test]
fn predict_wilkinson_matches_profile_average() {
    let t = tempfile::tempdir().unwrap();
    ok(&["predict", "--out", t.path().to_str().unwrap(), "--model", "twisted", "--symbol", WILKINSON, "--n", "10",
        "--samples", "10"]);
    // Outside the support every root of z - f(x) - lambda lies outside the
    // unit circle, so the potential is the average of log|z - f(x)|.
    let m = 200_000;
    for (z, v) in logpot_rows(&read(&t.path().join("predicted_logpot.csv"))) {
        let avg: f64 = (0..m)
            .map(|k| (z - C64::new(-1.0 + 2.0 * (k as f64 + 0.5) / m as f64, 0.0)).norm().ln())
            .sum::<f64>()
            / m as f64;
        assert!((v - avg).abs() < 1e-6, "z = {z}: {v} vs {avg}");
    }
}

#[test]
fn predict_refuses_zero_symbol() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["predict", "--out", t.path().to_str().unwrap(), "--model", "toeplitz", "--coefficients", "[0,0]",
        "--n", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("identically zero"));
}

#[test]
fn compare_rejects_wrong_schema() {
    let t = tempfile::tempdir().unwrap();
    let a = t.path().join("a.csv");
    let b = t.path().join("b.csv");
    std::fs::write(&a, "re,im\n1,0\n0,1\n").unwrap();
    std::fs::write(&b, "x,y,sigma_min\n0,0,1\n").unwrap();
    let o = run(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--out", t.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("b.csv"));
}

#[test]
fn compare_writes_report() {
    let t = tempfile::tempdir().unwrap();
    let a = t.path().join("a.csv");
    let pts: Vec<C64> = (0..50).map(|k| C64::from_polar(1.0, k as f64 * 0.1257)).collect();
    std::fs::write(&a, nonnormal::io::write_esd_csv(&pts)).unwrap();
    let out = t.path().join("o");
    ok(&["compare", a.to_str().unwrap(), a.to_str().unwrap(), "--out", out.to_str().unwrap(), "--test-points", "[3, [0, 4]]"]);
    let text = read(&out.join("compare.csv"));
    assert!(text.starts_with("logpot_rmse"));
}

#[test]
fn rigidity_passes_on_iid_diagonal() {
    let t = tempfile::tempdir().unwrap();
    ok(&["rigidity", "--out", t.path().to_str().unwrap(), "--model", "bidiagonal-iid", "--law",
        r#"{"kind":"uniform_interval","lo":-2,"hi":2}"#, "--n", "120", "--test-points",
        r#"{"kind":"points","points":[0.3]}"#]);
    let text = read(&t.path().join("theorem31.csv"));
    assert_eq!(text.lines().count(), 2);
    assert!(text.trim_end().ends_with("true"));
}

#[test]
fn rigidity_refuses_large_n() {
    let o = run(&["rigidity", "--model", "jordan", "--z", "0.5", "--n", "500"]);
    assert_eq!(o.status.code(), Some(2));
}
