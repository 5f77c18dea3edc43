use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("beamspec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn free_spectrum_csv() {
    let o = run(&["spectrum", "--free", "--n", "1..10"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("n,lambda_re,lambda_im,certified,newton_residual\n"));
    let rows = rows(&o);
    assert_eq!(rows.len(), 10);
    for r in rows {
        let n: f64 = r[0].parse().unwrap();
        let l: f64 = r[1].parse().unwrap();
        assert!((l - (PI * n).powi(4)).abs() < 1e-10 * l);
        assert_eq!(r[3], "true");
        // 17 significant digits
        assert_eq!(
            r[1].split('e')
                .next()
                .unwrap()
                .replace(['.', '-'], "")
                .len(),
            17
        );
    }
}

#[test]
fn output_is_deterministic() {
    let args = [
        "spectrum",
        "--example",
        "4.3",
        "--alpha",
        "sin:1:0.3",
        "--n",
        "1..6",
    ];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn equal_coefficient_beam_residuals_decay() {
    let o = run(&[
        "predict",
        "--example",
        "4.3",
        "--alpha",
        "sin:1",
        "--n",
        "8..16",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let nr: Vec<f64> = rows(&o)
        .iter()
        .map(|r| r[4].parse::<f64>().unwrap().abs())
        .collect();
    assert_eq!(nr.len(), 9);
    assert!(nr.windows(2).all(|w| w[1] < w[0]), "{nr:?}");
}

#[test]
fn config_file_and_json_output() {
    let cfg = temp(
        "h.json",
        r#"{"operator": "h", "coefficients": {"p": {"kind": "zero"}, "q": {"kind": "fourier", "const": 2.0}}, "n_range": [1, 3], "tolerances": {"newton": 1e-12}}"#,
    );
    let o = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for (i, r) in rows.iter().enumerate() {
        let l = r["lambda_re"].as_f64().unwrap();
        let expect = (PI * (i + 1) as f64).powi(4) + 2.0;
        assert!((l - expect).abs() < 1e-9 * expect);
    }
}

#[test]
fn beam_config_transform_and_count() {
    let cfg = temp(
        "eb.json",
        r#"{"operator": "eb", "coefficients": {"alpha": {"kind": "fourier", "sin": [0.2]}, "beta": {"kind": "fourier", "cos": [0.1]}, "b0": 1.5}, "bc": "ebdc", "n_range": [1, 4]}"#,
    );
    let path = cfg.to_str().unwrap();
    let o = run(&["transform", "--config", path, "--points", "11"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&o).len(), 11);
    let o = run(&["count", "--config", path]);
    assert!(o.status.success());
    for r in rows(&o) {
        assert_eq!(r[0], r[2]);
    }
}

#[test]
fn recover_from_derivative_file() {
    // β = sin 2πx with α = 0: λₙ'(0) = −2(πn)³ β̂sₙ, β̂s₁ = 1/2
    let d1 = -(PI.powi(3));
    let derivs = temp(
        "derivs.csv",
        &format!("n,derivative\n1,{d1:.17e}\n2,0\n3,0\n"),
    );
    let o = run(&[
        "recover",
        "--derivs",
        derivs.to_str().unwrap(),
        "--free",
        "--points",
        "5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for r in rows(&o) {
        let x: f64 = r[0].parse().unwrap();
        let v: f64 = r[1].parse().unwrap();
        assert!((v - (2.0 * PI * x).sin()).abs() < 1e-12);
    }
}

#[test]
fn oracle_agrees_for_the_operator_square() {
    let o = run(&["oracle", "--example", "3", "--n", "1..4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for r in rows(&o) {
        let d: f64 = r[1].parse().unwrap();
        let s: f64 = r[4].parse().unwrap();
        assert!((d - s).abs() < 1e-7 * d);
    }
}

#[test]
fn selftest_subset_passes() {
    let o = run(&["selftest", "--only", "1,2,9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&o).len(), 3);
}

#[test]
fn malformed_config_exits_with_1() {
    let cfg = temp(
        "bad.json",
        r#"{"operator": "h", "coefficients": {"p": {"kind": "spline"}}}"#,
    );
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["spectrum"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["spectrum", "--free", "--n", "5..2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_with_2_and_diagnostic_json() {
    let cfg = temp(
        "h2.json",
        r#"{"operator": "h", "coefficients": {"p": {"kind": "fourier", "sin": [0.5]}}}"#,
    );
    let o = run(&[
        "det",
        "--config",
        cfg.to_str().unwrap(),
        "--grid",
        "z",
        "--start",
        "500",
        "--end",
        "500",
        "--points",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let diag: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["kind"], "numerical");
    assert_eq!(diag["command"], "det");
}
