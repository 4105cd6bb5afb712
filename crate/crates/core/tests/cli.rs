use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn heyde(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_heyde"));
    for key in ["HEYDE_CONFIG", "HEYDE_SEED", "HEYDE_TOLERANCE", "HEYDE_OUT", "HEYDE_CSV"] {
        cmd.env_remove(key);
    }
    cmd.args(args).envs(envs.iter().copied()).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = heyde(args, &[]);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

#[test]
fn counterexample_defaults_certify() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("cert.json");
    let o = heyde(&["counterexample", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert = json(&out);
    assert_eq!(cert["valid"], true);
    assert_eq!(cert["k"], 3);
    assert_eq!(cert["det_i_plus_alpha"], -1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("certificate VALID"));
}

#[test]
fn counterexample_exit_codes() {
    let dir = TempDir::new().unwrap();
    let one = write(&dir, "k1.json", r#"{"kappa": 1.0}"#);
    let (code, cert) = run_json(&["counterexample", "--config", &one]);
    assert_eq!(code, 1);
    assert_eq!(cert["failed_stage"], "d");

    let bad = write(&dir, "bad.json", r#"{"alpha": [[1, 2, 3]]}"#);
    assert_eq!(heyde(&["counterexample", "--config", &bad], &[]).status.code(), Some(2));
    let garbage = write(&dir, "garbage.json", "{ not json");
    assert_eq!(heyde(&["counterexample", "--config", &garbage], &[]).status.code(), Some(2));
    let unknown = write(&dir, "unknown.json", r#"{"kapa": 0.3}"#);
    assert_eq!(heyde(&["counterexample", "--config", &unknown], &[]).status.code(), Some(2));
    assert_eq!(heyde(&["counterexample", "--config", "/nonexistent/x.json"], &[]).status.code(), Some(2));
}

#[test]
fn counterexample_is_byte_deterministic() {
    let a = heyde(&["counterexample"], &[]);
    let b = heyde(&["counterexample"], &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_symmetry_cases() {
    let dir = TempDir::new().unwrap();
    let e0 = write(
        &dir,
        "e0.json",
        r#"{"group": {"kind": "finite", "orders": [5]}, "alpha": [[2]],
            "mu1": {"masses": [1, 0, 0, 0, 0]}, "mu2": {"masses": [1, 0, 0, 0, 0]}}"#,
    );
    let (code, r) = run_json(&["check-symmetry", "--config", &e0]);
    assert_eq!(code, 0);
    assert_eq!(r["symmetric"], true);
    assert_eq!(r["agree"], true);

    let kernel = write(
        &dir,
        "kernel.json",
        r#"{"group": {"kind": "finite", "orders": [5]}, "alpha": [[4]],
            "mu1": {"masses": [0.6, 0.4, 0, 0, 0]}, "mu2": {"masses": [0.6, 0.4, 0, 0, 0]}}"#,
    );
    let (code, r) = run_json(&["check-symmetry", "--config", &kernel]);
    assert_eq!((code, r["symmetric"].clone()), (0, Value::Bool(true)));

    let random = write(
        &dir,
        "random.json",
        r#"{"group": {"kind": "finite", "orders": [5]}, "alpha": [[3]],
            "mu1": {"masses": [0.1, 0.2, 0.3, 0.15, 0.25]}, "mu2": {"masses": [0.5, 0, 0.2, 0.3, 0]}}"#,
    );
    let (code, r) = run_json(&["check-symmetry", "--config", &random]);
    assert_eq!(code, 0);
    assert_eq!(r["agree"], true);
    assert_eq!(r["symmetric"], false);
    assert_eq!(r["brute_force"]["method"], "brute_force");

    let torus = write(
        &dir,
        "torus.json",
        r#"{"group": {"kind": "torus", "dim": 2}, "alpha": [[-1, 1], [1, -2]], "window": 2,
            "mu1": {"gaussian": {"a": [[1, -1], [-1, 2]]}, "radius": 8},
            "mu2": {"gaussian": {"a": [[1, 0], [0, 1]]}, "radius": 8}}"#,
    );
    let (code, r) = run_json(&["check-symmetry", "--config", &torus]);
    assert_eq!(code, 0);
    assert_eq!(r["symmetric"], true);
    assert_eq!(r["brute_force"], Value::Null);

    assert_eq!(heyde(&["check-symmetry"], &[]).status.code(), Some(2));
    let mismatch = write(
        &dir,
        "mismatch.json",
        r#"{"group": {"kind": "finite", "orders": [5]}, "alpha": [[2]],
            "mu1": {"masses": [1, 0, 0]}, "mu2": {"masses": [1, 0, 0, 0, 0]}}"#,
    );
    assert_eq!(heyde(&["check-symmetry", "--config", &mismatch], &[]).status.code(), Some(2));
}

#[test]
fn sweep_exit_codes_and_determinism() {
    let dir = TempDir::new().unwrap();
    let small = write(&dir, "small.json", r#"{"max_order": 6, "pairs": 10}"#);
    let a = heyde(&["sweep", "--config", &small, "--seed", "5"], &[]);
    assert_eq!(a.status.code(), Some(0));
    let b = heyde(&["sweep", "--config", &small], &[("HEYDE_SEED", "5")]);
    assert_eq!(a.stdout, b.stdout);
    let c = heyde(&["sweep", "--config", &small, "--seed", "6"], &[]);
    assert_ne!(a.stdout, c.stdout);

    let csv = dir.path().join("rows.csv");
    let o = heyde(&["sweep", "--config", &small, "--csv", csv.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&csv).unwrap().lines().count() > 1);

    let fault = write(&dir, "fault.json", r#"{"max_order": 4, "pairs": 3, "fault": "convolution"}"#);
    let (code, r) = run_json(&["sweep", "--config", &fault]);
    assert_eq!(code, 1);
    assert!(r["violations"].as_array().is_some_and(|v| !v.is_empty()));

    let empty = write(&dir, "empty.json", r#"{"pairs": 0}"#);
    assert_eq!(heyde(&["sweep", "--config", &empty], &[]).status.code(), Some(2));
    let bad_tol = heyde(&["sweep", "--config", &small, "--tolerance", "-1"], &[]);
    assert_eq!(bad_tol.status.code(), Some(2));
}

#[test]
fn decompose_and_membership() {
    let dir = TempDir::new().unwrap();
    let pair = write(
        &dir,
        "pair.json",
        r#"{"group": {"kind": "finite", "orders": [2, 2, 3]},
            "alpha": [[0, 1, 0], [1, 1, 0], [0, 0, 1]],
            "mu1": {"masses": [0, 0.6, 0, 0, 0.2, 0, 0, 0.1, 0, 0, 0.1, 0]},
            "mu2": {"masses": [0, 0, 0.7, 0, 0, 0.1, 0, 0, 0.2, 0, 0, 0]}}"#,
    );
    let (code, r) = run_json(&["decompose", "--config", &pair]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["certified"], true);
    assert_eq!(r["decomposition"]["constants"].as_array().unwrap().len(), 4);

    let fin = write(
        &dir,
        "fin.json",
        r#"{"group": {"kind": "finite", "orders": [2, 3]}, "measure": {"masses": [0.5, 0, 0, 0.5, 0, 0]}}"#,
    );
    let (code, r) = run_json(&["membership", "--config", &fin]);
    assert_eq!((code, r["member"].clone()), (0, Value::Bool(true)));

    let gauss = write(
        &dir,
        "gauss.json",
        r#"{"group": {"kind": "torus", "dim": 2}, "measure": {"gaussian": {"a": [[0.3, 0.1], [0.1, 0.2]], "shift": [0.1, 0.7]}, "radius": 10}}"#,
    );
    let (code, r) = run_json(&["membership", "--config", &gauss]);
    assert_eq!((code, r["member"].clone()), (0, Value::Bool(true)));

    let out = dir.path().join("m.json");
    let o = heyde(&["membership"], &[("HEYDE_CONFIG", &fin), ("HEYDE_OUT", out.to_str().unwrap())]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&out)["member"], true);
}
