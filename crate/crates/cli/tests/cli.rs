use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nmm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmm"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn re(v: &Value) -> f64 {
    v[0].as_f64().unwrap()
}

/// Data rows of a CSV file, skipping the metadata line and the header.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# nmm "));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn curve_examples() {
    let dir = tempfile::tempdir().unwrap();
    let circle = dir.path().join("circle");
    assert!(nmm(&["curve", "--from-moments", "t0=0.25"], &circle).status.success());
    let c = json(&circle.join("curve.json"));
    assert!((c["curve"]["r"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let ellipse = dir.path().join("ellipse");
    assert!(nmm(&["curve", "--from-moments", "t0=0.21", "t2=0.2"], &ellipse).status.success());
    let c = json(&ellipse.join("curve.json"));
    assert!((c["curve"]["r"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((re(&c["curve"]["a"][1]) - 0.2).abs() < 1e-12);
    assert_eq!(rows(&ellipse.join("boundary.csv")).len(), 512);

    let hypo = dir.path().join("hypo");
    assert!(nmm(&["curve", "--from-coeffs", "r=0.3", "a2=0.027"], &hypo).status.success());
    let c = json(&hypo.join("curve.json"));
    assert!((re(&c["moments"]["t"][2]) - 0.1).abs() < 1e-12);
}

#[test]
fn curve_failures_carry_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmm(&["curve", "--from-moments", "t0=0.01", "t3=3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(diag["error"], "no_convergence");
    assert!(diag["residual"].as_f64().unwrap() > 0.0);

    let out = nmm(&["curve", "--from-moments", "t0=0.01", "t2=0.6"], dir.path());
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn gaussian_ortho_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmm(&["ortho", "--t0", "0.1", "--t2", "0.2", "--N", "32", "--n-max", "24"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = rows(&dir.path().join("recursion.csv"));
    for row in &rec[1..=24] {
        let (r, exact): (f64, f64) = (row[1].parse().unwrap(), row[5].parse().unwrap());
        assert!((r - exact).abs() <= 1e-5 * exact, "{row:?}");
    }
    assert_eq!(rows(&dir.path().join("zeros_24.csv")).len(), 24);
    assert_eq!(rows(&dir.path().join("norms.csv")).len(), 25);
}

#[test]
fn cubic_ortho_zeros_lie_on_rays() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmm(&["ortho", "--t0", "0.05", "--t3", "0.05", "--N", "30", "--n-max", "30"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for row in rows(&dir.path().join("zeros_30.csv")) {
        let (x, y): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        let arg = y.atan2(x).rem_euclid(std::f64::consts::TAU / 3.0);
        assert!(arg.min(std::f64::consts::TAU / 3.0 - arg) < 1e-6, "{row:?}");
    }
    let s = json(&dir.path().join("string_residuals.json"));
    assert!(s["string_equation"]["diagonal_residual"].as_f64().unwrap() <= 1e-4);
    assert!(dir.path().join("density_profile.csv").exists());
}

#[test]
fn missing_n_max_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmm(&["ortho", "--t0", "0.1", "--N", "8"], dir.path());
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn gas_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gas", "--t0", "0.1", "--t2", "0.2", "--N", "16", "--steps", "4000", "--seed", "7"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(nmm(&args, &a).status.success());
    assert!(nmm(&args, &b).status.success());
    for name in ["gas.json", "histogram.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let g = json(&a.join("gas.json"));
    assert_eq!(g["metadata"]["seed"], 7);
    assert!(g["metadata"]["rng"].is_string());
    assert!(g["observables"]["acceptance_rate"].as_f64().unwrap() > 0.2);

    let other = dir.path().join("c");
    let mut args = args.to_vec();
    args[10] = "8";
    assert!(nmm(&args, &other).status.success());
    assert_ne!(fs::read(a.join("gas.json")).unwrap(), fs::read(other.join("gas.json")).unwrap());
}

#[test]
fn toda_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmm(&["toda", "--t0", "0.1", "--t2", "0.1", "--flow", "2"], dir.path());
    assert!(out.status.success());
    let t = json(&dir.path().join("toda.json"));
    assert!(t["string_residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(t["flow_k"], 2);
}

#[test]
fn levelspacing_sums_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = nmm(&["levelspacing", "--t0", "1", "--N", "16", "--x", "1"], dir.path());
    assert!(out.status.success());
    let table = rows(&dir.path().join("levelspacing.csv"));
    assert_eq!(table.len(), 17);
    let sum: f64 = table.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((sum - 1.0).abs() <= 1e-12);
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# Gaussian disc\nt0 = 1\nN = 16\nx = 1\n").unwrap();
    let out = nmm(&["levelspacing", "--config", cfg.to_str().unwrap(), "--N", "4"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows(&dir.path().join("levelspacing.csv")).len(), 5);

    fs::write(&cfg, "t0 = 1\nN = 16\nx = 1\nsweeps = 3\n").unwrap();
    let out = nmm(&["levelspacing", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweeps"));
}

#[test]
fn help_lists_every_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_nmm"))
        .args(["gas", "--help"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let help = String::from_utf8_lossy(&out.stdout);
    for flag in ["--t0", "--t2", "--N", "--steps", "--burn-in", "--seed", "--scale", "--cutoff", "--bins", "--out", "--config"] {
        assert!(help.contains(flag), "{flag}");
    }
}

#[test]
fn check_rejects_unknown_criteria() {
    let out = Command::new(env!("CARGO_BIN_EXE_nmm"))
        .args(["check", "--only", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}
