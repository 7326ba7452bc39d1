use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn hessone(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hessone"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn construct(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let mut all = vec!["construct"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", name]);
    let o = hessone(&all, dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir.join(name)
}

fn singularities(path: &Path) -> Vec<[f64; 2]> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    serde_json::from_value(v["singularities"].clone()).unwrap()
}

fn write_moduli(dir: &Path, name: &str, c1: f64, extra: &[[f64; 2]], radii: &[f64]) {
    let m = serde_json::json!({"n": radii.len() + 1, "c1": c1, "extra_centers": extra, "radii": radii});
    fs::write(dir.join(name), m.to_string()).unwrap();
}

#[test]
fn disk_construct_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let sol = construct(dir.path(), "sol.json", &["--mode", "disk"]);
    let s = singularities(&sol);
    assert_eq!(s.len(), 1);
    assert!(s[0][0].abs() < 1e-8 && s[0][1].abs() < 1e-8);
    let o = hessone(&["verify", "sol.json", "--out", "report.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r["summary"], Value::Bool(true));
    assert_eq!(r["seed"], 0x5EED);
}

#[test]
fn annulus_singularities() {
    let dir = tempfile::tempdir().unwrap();
    let sol = construct(dir.path(), "sol.json", &["--mode", "annulus", "--r", "0.5", "--z0", "0.7,0"]);
    let s = singularities(&sol);
    assert_eq!(s.len(), 2);
    assert!(s[0][0].abs() < 1e-8 && s[0][1].abs() < 1e-8);
    assert!((s[1][0] + 1.0 / 0.7).abs() < 1e-8 && s[1][1].abs() < 1e-8);
}

#[test]
fn overlapping_moduli_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write_moduli(dir.path(), "m.json", 1.2, &[], &[0.5]);
    let o = hessone(
        &["construct", "--mode", "numeric", "--moduli", "m.json", "--degree", "24", "--out", "sol.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid moduli"));
    assert!(!dir.path().join("sol.json").exists());
}

#[test]
fn annulus_mode_needs_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let o = hessone(&["construct", "--mode", "annulus", "--out", "sol.json"], dir.path());
    assert_eq!(code(&o), 1);
    let o = hessone(&["construct", "--mode", "annulus", "--r", "0.5", "--out", "sol.json"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn construct_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"mode":"annulus","annulus":{"r":0.5,"z0":[0.7,0]},"outputs":{"solution":"from_cfg.json"}}"#;
    fs::write(dir.path().join("run.json"), cfg).unwrap();
    let o = hessone(&["construct", "--config", "run.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(singularities(&dir.path().join("from_cfg.json")).len(), 2);
}

#[test]
fn disk_sample_csv() {
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), "sol.json", &["--mode", "disk"]);
    let args = [
        "sample",
        "sol.json",
        "--radial-steps",
        "50",
        "--angular-steps",
        "64",
        "--out",
        "a.csv",
        "--obj",
        "a.obj",
    ];
    let o = hessone(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,phi,phi_x,phi_y,phi_xx,phi_xy,phi_yy,ma_residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3200);
    for r in &rows {
        assert_eq!(r.len(), 9);
        assert!(r[8].abs() <= 1e-10);
    }
    let mesh = fs::read_to_string(dir.path().join("a.obj")).unwrap();
    assert_eq!(mesh.lines().filter(|l| l.starts_with("v ")).count(), 3200);
    assert_eq!(mesh.lines().filter(|l| l.starts_with("f ")).count(), 2 * 49 * 64);

    // same input, same bytes
    let o = hessone(&["sample", "sol.json", "--radial-steps", "50", "--angular-steps", "64", "--out", "b.csv"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn small_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), "sol.json", &["--mode", "disk"]);
    let o = hessone(&["sample", "sol.json", "--angular-steps", "4", "--out", "a.csv"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(!dir.path().join("a.csv").exists());
}

#[test]
fn annulus_rows_approach_the_inner_singularity() {
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), "sol.json", &["--mode", "annulus", "--r", "0.5", "--z0", "0.7,0"]);
    let o = hessone(&["sample", "sol.json", "--radial-steps", "16", "--angular-steps", "16", "--out", "a.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let target = -1.0 / 0.7;
    let nearest = text
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').take(2).map(|s| s.parse().unwrap()).collect();
            (v[0] - target).hypot(v[1])
        })
        .fold(f64::INFINITY, f64::min);
    assert!(nearest < 1e-2, "{nearest}");
}

#[test]
fn corrupted_solution_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let sol = construct(dir.path(), "sol.json", &["--mode", "disk"]);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&sol).unwrap()).unwrap();
    v["f_scale"] = serde_json::json!(1.05);
    fs::write(dir.path().join("bad.json"), v.to_string()).unwrap();
    let o = hessone(&["verify", "bad.json", "--out", "report.json"], dir.path());
    assert_eq!(code(&o), 2);
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let contraction = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "contraction").unwrap();
    assert_eq!(contraction["status"], "fail");
    assert!(contraction["location"]["conformal"].is_array());
}

#[test]
fn tolerance_override_is_noted() {
    let dir = tempfile::tempdir().unwrap();
    construct(dir.path(), "sol.json", &["--mode", "annulus", "--r", "0.5", "--z0", "0.7,0"]);
    let o = hessone(&["verify", "sol.json", "--tol", "ma=1e-2", "--samples", "200", "--out", "r.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert!(r.contains("tolerance override ma=1e-2"));
    let o = hessone(&["verify", "sol.json", "--tol", "speed=1"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn unreadable_solution() {
    let dir = tempfile::tempdir().unwrap();
    let o = hessone(&["verify", "missing.json"], dir.path());
    assert_eq!(code(&o), 1);
    fs::write(dir.path().join("junk.json"), "{").unwrap();
    let o = hessone(&["verify", "junk.json"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn numeric_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_moduli(dir.path(), "m.json", 3.0, &[[-3.0, 0.0]], &[0.6, 0.6]);
    let sol = construct(dir.path(), "sol.json", &["--mode", "numeric", "--moduli", "m.json", "--degree", "24"]);
    assert_eq!(singularities(&sol).len(), 3);
    let o = hessone(&["verify", "sol.json", "--out", "r.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_and_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hessone(&["--help"], dir.path())), 0);
    assert_eq!(code(&hessone(&["construct", "--bogus"], dir.path())), 1);
}
