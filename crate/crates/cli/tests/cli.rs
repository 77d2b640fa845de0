use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qutrit-qrg"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn invariants_of_psi0() {
    let o = run(&["invariants", fixture("psi0_a1_b0.json").to_str().unwrap()]);
    let v = stdout_json(&o);
    assert!((v["i6"]["re"].as_f64().unwrap() + 1.0 / 27.0).abs() < 1e-12, "{v}");
    assert_eq!(v["i6"]["im"].as_f64().unwrap(), 0.0);
    assert_eq!(v["i9"]["re"].as_f64().unwrap(), 0.0);
    assert!((v["scale"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(v["genuine"], Value::Bool(false));
}

#[test]
fn ghz_qutrit_has_vanishing_hyperdeterminant() {
    let v = stdout_json(&run(&["invariants", fixture("ghz_qutrit.json").to_str().unwrap()]));
    assert_eq!(v["delta333"]["re"].as_f64().unwrap(), 0.0);
    assert_eq!(v["delta333"]["im"].as_f64().unwrap(), 0.0);
    assert!((v["i6"]["re"].as_f64().unwrap() - 1.0 / 27.0).abs() < 1e-12);
}

#[test]
fn invariant_exit_codes() {
    for (file, code) in [("zero.json", 3), ("truncated.json", 2), ("wrong_length.json", 2)] {
        let o = run(&["invariants", fixture(file).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(code), "{file}");
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["invariants", "/nonexistent/tensor.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn random_tensor_from_seed() {
    let a = run(&["invariants", "--seed", "5", "--sl-check"]);
    let b = run(&["invariants", "--seed", "5", "--sl-check"]);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert!(v["sl_check_max_rel_dev"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["genuine"], Value::Bool(true));
    let c = run(&["invariants", "--seed", "6"]);
    assert_ne!(stdout_json(&c)["i6"], v["i6"]);
}

#[test]
fn block_isotropic_point() {
    let v = stdout_json(&run(&["block", "--delta", "1", "--d", "0", "--verify-ed"]));
    assert!((v["x_ren_sq"].as_f64().unwrap() - 0.5625).abs() < 1e-12);
    assert!(v["ed_max_deviation"].as_f64().unwrap() < 1e-9);
    assert!((v["eps0"].as_f64().unwrap() + 3.0).abs() < 1e-12);
}

#[test]
fn block_rejects_bad_input() {
    let o = run(&["block", "--delta", "-0.5", "--d", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["block", "--d", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--delta"));
}

#[test]
fn flow_lines() {
    let o = run(&["flow", "--delta", "1", "--d", "0", "--steps", "16"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 17);
    for (n, l) in lines.iter().enumerate() {
        assert_eq!(l["step"].as_u64().unwrap(), n as u64);
        assert!((l["couplings"]["delta"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!(l["couplings"]["d"].as_f64().unwrap().abs() < 1e-9);
    }

    let o = run(&["flow", "--delta", "0.3", "--d", "0.2", "--steps", "0"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1);

    let o = run(&["flow", "--delta", "0", "--d", "2", "--steps", "16"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["status"], "singular");
    assert!(last["cause"].as_str().unwrap().contains("eps0"));
}

#[test]
fn scan_writes_csv_boundaries_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d0_scan.csv");
    let o = run(&[
        "scan", "--d", "0", "--delta-min", "0", "--delta-max", "2", "--points", "201", "--depths", "9",
        "--gnuplot", "--out", csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut best = (f64::MIN, 0.0);
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (delta, v): (f64, f64) = (f[0].parse().unwrap(), f[5].parse().unwrap());
        if v > best.0 {
            best = (v, delta);
        }
    }
    assert!((best.1 - 1.0).abs() <= 0.01, "peak at {}", best.1);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("d0_scan.boundaries.json")).unwrap()).unwrap();
    assert_eq!(report["d"].as_f64().unwrap(), 0.0);
    let gp = fs::read_to_string(dir.path().join("d0_scan.gp")).unwrap();
    assert!(gp.contains("d0_scan.csv"));
}

#[test]
fn scan_d14_has_three_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d14_scan.csv");
    let o = run(&[
        "scan", "--d", "1.4", "--delta-max", "3", "--depths", "14,15,16", "--out", csv.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("d14_scan.boundaries.json")).unwrap()).unwrap();
    let b = report["boundaries"].as_array().unwrap();
    assert_eq!(b.len(), 3);
    for (got, want) in b.iter().zip([0.52535, 1.6495, 2.1325]) {
        assert!((got["delta_c"].as_f64().unwrap() - want).abs() < 0.01);
    }
}

#[test]
fn degenerate_scan() {
    let o = run(&["scan", "--d", "0", "--delta-min", "0", "--delta-max", "1", "--points", "2", "--depths", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    let report: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(report["boundaries"].as_array().unwrap().is_empty());
}

#[test]
fn output_is_independent_of_jobs() {
    let args = ["scan", "--d", "1.4", "--delta-max", "3", "--points", "120", "--depths", "15,16"];
    let one = bin().args(args).args(["--jobs", "1"]).output().unwrap();
    let four = bin().args(args).args(["--jobs", "4"]).output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stderr, four.stderr);
    assert_eq!(run(&["scan", "--d", "0", "--jobs", "0"]).status.code(), Some(1));
}

#[test]
fn phase_matches_crossings() {
    let v = stdout_json(&run(&["phase", "--d", "0", "--delta-max", "2", "--depths", "9,10"]));
    let b = v["boundaries"].as_array().unwrap();
    assert_eq!(b.len(), 1);
    assert!((b[0]["delta_c"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(b[0]["kind"], "peak");

    let v = stdout_json(&run(&[
        "phase", "--d", "1.4", "--depths", "15,16", "--bracket", "2.05,2.2", "--refine-tol", "1e-8",
    ]));
    let b = &v["boundaries"][0];
    assert!((b["delta_c"].as_f64().unwrap() - 2.1325).abs() < 0.01);
    assert_eq!(b["kind"], "peak");
    assert_eq!(v["refine_tol"].as_f64().unwrap(), 1e-8);

    let o = run(&["phase", "--d", "2.5", "--delta-min", "2", "--delta-max", "4", "--depths", "10,11", "--bracket", "3,3.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no sign change"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "delta = 1.0\nd = 0.0\nsteps = 3\n").unwrap();
    let o = run(&["flow", "--config", cfg.to_str().unwrap()]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);
    let o = run(&["flow", "--config", cfg.to_str().unwrap(), "--steps", "1"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2);

    let out = dir.path().join("block.json");
    fs::write(&cfg, format!("delta = 1.0\nd = 0.0\nout = {:?}\n", out.to_str().unwrap())).unwrap();
    let o = run(&["block", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["z_ren_sq"].as_f64().unwrap() - 0.5625).abs() < 1e-12);

    fs::write(&cfg, "delta = [1.0\n").unwrap();
    assert_eq!(run(&["block", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, "temperature = 3\n").unwrap();
    assert_eq!(run(&["block", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
