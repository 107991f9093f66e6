//! End-to-end tests of the `psgeo` binary: exit codes, table format, point
//! digests and flag handling.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_psgeo"))
}

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("specs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    cmd.output().unwrap()
}

#[test]
fn check_passes_on_sphere() {
    let out = run(&["check", spec("sphere_r2.surf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("overall: PASS"), "{text}");
    assert!(text.contains("k_poisson_vs_classical"));
}

#[test]
fn check_fails_with_impossible_tolerance() {
    let out = run(&[
        "check",
        spec("sphere_r2.surf").to_str().unwrap(),
        "--tol",
        "k_poisson_vs_classical=1e-18",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("overall: FAIL"), "{text}");
}

#[test]
fn unknown_tolerance_is_input_error() {
    let out = run(&[
        "check",
        spec("sphere_r2.surf").to_str().unwrap(),
        "--tol",
        "bogus=1e-3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_is_input_error() {
    let out = run(&["check", "no_such_file.surf"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn vanishing_density_rejected() {
    let out = run(&["check", spec("sphere_r2.surf").to_str().unwrap(), "--rho", "0"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("density"));
}

#[test]
fn rho_override_still_passes() {
    let out = run(&[
        "check",
        spec("torus_2_1.surf").to_str().unwrap(),
        "--rho",
        "1+u1^2+u2^2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("u1^2"), "{text}");
}

#[test]
fn table_sphere_values() {
    let out = run(&["table", spec("sphere_r2.surf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "u1,u2,K_classical,K_poisson,K_nested,H_norm_classical,H_norm_poisson,sqrt_g,rho"
    );
    assert_eq!(lines.len(), 401); // header + 20x20
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        let k: f64 = cols[3].parse().unwrap();
        assert!((k - 0.25).abs() < 1e-9);
        let h: f64 = cols[6].parse().unwrap();
        assert!((h - 0.5).abs() < 1e-9);
    }
}

#[test]
fn table_catenoid_is_minimal() {
    let out = run(&["table", spec("catenoid.surf").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    for row in text.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        let h: f64 = cols[5].parse().unwrap();
        assert!(h.abs() < 1e-9, "{row}");
    }
}

#[test]
fn table_horosphere_empty_nested_column() {
    let out = run(&["table", spec("horosphere.surf").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    for row in text.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert!(cols[4].is_empty());
    }
}

#[test]
fn table_out_deterministic() {
    let tmp = std::env::temp_dir();
    let p1 = tmp.join("psgeo_cli_t1.csv");
    let p2 = tmp.join("psgeo_cli_t2.csv");
    for p in [&p1, &p2] {
        let out = run(&[
            "table",
            spec("torus_2_1.surf").to_str().unwrap(),
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    let _ = std::fs::remove_file(&p1);
    let _ = std::fs::remove_file(&p2);
}

#[test]
fn point_digest_sphere() {
    let out = run(&[
        "point",
        spec("sphere_r2.surf").to_str().unwrap(),
        "--u",
        "1.0471975511965976,0.7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("g = 12.000000000000"), "{text}");
    assert!(text.contains("K_nested"), "{text}");
}

#[test]
fn point_torus_one_third() {
    let out = run(&[
        "point",
        spec("torus_2_1.surf").to_str().unwrap(),
        "--u",
        "0,0",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("K_classical = 3.333333333333333"), "{text}");
    assert!(text.contains("K_poisson   = 3.333333333333"), "{text}");
    assert!(text.contains("K_nested    = 3.333333333333"), "{text}");
}

#[test]
fn degenerate_point_is_failure_exit() {
    let out = run(&["point", spec("sphere_r2.surf").to_str().unwrap(), "--u", "0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn malformed_u_is_input_error() {
    let out = run(&["point", spec("sphere_r2.surf").to_str().unwrap(), "--u", "abc"]);
    assert_eq!(out.status.code(), Some(2));
}
