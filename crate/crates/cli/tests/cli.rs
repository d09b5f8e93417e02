use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn polyech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyech")).args(args).env("POLYECH_THREADS", "2").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn square_homology_ranks() {
    let spec = specs().join("below-square.json");
    let v = json(&polyech(&["homology", "--spec", spec.to_str().unwrap(), "--degrees", "0..6"]));
    let ranks: Vec<u64> = v.as_array().unwrap().iter().map(|r| r["rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks, [4, 1, 1, 1, 1, 1, 1]);
    assert!(v.as_array().unwrap().iter().all(|r| r["torsion"].as_array().unwrap().is_empty() && r["partial"] == false));
}

#[test]
fn enumerate_square() {
    let below = specs().join("square.json");
    let v = json(&polyech(&["paths", "enumerate", "--below", below.to_str().unwrap()]));
    assert_eq!(v.as_array().unwrap().len(), 15);
}

#[test]
fn build_writes_matrices() {
    let dir = std::env::temp_dir().join(format!("polyech-build-{}", std::process::id()));
    let spec = specs().join("below-square.json");
    let v = json(&polyech(&["complex", "build", "--spec", spec.to_str().unwrap(), "--out", dir.to_str().unwrap()]));
    let total: u64 = v.as_array().unwrap().iter().map(|d| d["rank"].as_u64().unwrap()).sum();
    assert_eq!(total, 76);
    let b1 = std::fs::read_to_string(dir.join("boundary_1.txt")).unwrap();
    assert!(b1.starts_with("10 16 "));
    let basis: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("basis_6.json")).unwrap()).unwrap();
    assert_eq!(basis.as_array().unwrap().len(), 1);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn stabilized_bar() {
    let spec = specs().join("bar.json");
    let v = json(&polyech(&["homology", "--spec", spec.to_str().unwrap(), "--degrees", "0..2", "--stabilize"]));
    for r in v.as_array().unwrap() {
        assert_eq!(r["rank"], 3);
        assert_eq!(r["partial"], false);
    }
}

#[test]
fn verify_is_deterministic() {
    let a = polyech(&["verify", "delta-squared", "--seed", "7"]);
    let b = polyech(&["verify", "delta-squared", "--seed", "7"]);
    let v = json(&a);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["exit_status"], 0);
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn table_format() {
    let out = polyech(&["verify", "homotopy", "--format", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("homotopy/k") && l.contains("pass")));
}

#[test]
fn malformed_input_fails() {
    let dir = std::env::temp_dir().join(format!("polyech-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"kind":"bar","n":1}"#).unwrap();
    let out = polyech(&["homology", "--spec", bad.to_str().unwrap(), "--degrees", "0..1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = polyech(&["verify", "no-such-suite"]);
    assert!(!out.status.success());
    let out = polyech(&["homology", "--spec", bad.to_str().unwrap(), "--degrees", "3..1"]);
    assert!(!out.status.success());
    std::fs::remove_dir_all(dir).ok();
}
