//! End-to-end runs of the binary against temporary projects.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn triangle() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../projects/triangle/config.json")
}

fn run(config: &Path, args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_datacomplex"))
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn copy_triangle(dir: &Path) {
    let src = triangle().parent().unwrap().to_path_buf();
    for f in ["config.json", "schema.json", "XY.csv", "XZ.csv", "YZ.csv"] {
        std::fs::copy(src.join(f), dir.join(f)).unwrap();
    }
}

#[test]
fn validate_accepts_the_example() {
    let (code, v) = run(&triangle(), &["validate"]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true);
    assert_eq!(v["version"], "1");
    assert_eq!(v["command"], "validate");
}

#[test]
fn validate_points_at_an_undeclared_attribute() {
    let dir = tempfile::tempdir().unwrap();
    copy_triangle(dir.path());
    let cfg = dir.path().join("config.json");
    let text = std::fs::read_to_string(&cfg).unwrap().replacen("\"Y\"", "\"W\"", 1);
    std::fs::write(&cfg, text).unwrap();
    let (code, v) = run(&cfg, &["validate"]);
    assert_eq!(code, 2);
    assert_eq!(v["valid"], false);
    let diags = v["error"]["diagnostics"].as_array().unwrap();
    assert!(diags.iter().any(|d| d["field"].as_str().unwrap().starts_with("tables[0].list[")), "{v}");
}

#[test]
fn malformed_csv_is_an_ingest_error() {
    let dir = tempfile::tempdir().unwrap();
    copy_triangle(dir.path());
    std::fs::write(dir.path().join("XY.csv"), "X,Y\n0,7\n").unwrap();
    let (code, v) = run(&dir.path().join("config.json"), &["marginal", "XY", "--drop", "0"]);
    assert_eq!(code, 3, "{v}");
    assert!(v["error"]["kind"].is_string());
}

#[test]
fn missing_config_is_a_config_error() {
    let (code, _) = run(Path::new("/nonexistent/config.json"), &["validate"]);
    assert_eq!(code, 2);
}

#[test]
fn wasserstein_to_itself_is_zero() {
    let (code, v) = run(&triangle(), &["wasserstein", "XY", "XY"]);
    assert_eq!(code, 0);
    assert_eq!(v["distance"], "0");
}

#[test]
fn tiny_budget_is_reported() {
    let (code, v) = run(&triangle(), &["--budget", "1", "fill-boundary", "--cell", "X,Y,Z", "--slack", "1/2"]);
    assert_eq!(code, 4, "{v}");
}

#[test]
fn trichotomy_follows_the_slack() {
    let (_, at0) = run(&triangle(), &["trichotomy", "--dim", "2", "--slack", "0"]);
    let (_, at_third) = run(&triangle(), &["trichotomy", "--dim", "2", "--slack", "1/3"]);
    assert_eq!(at0["case"], 2);
    assert_eq!(at_third["case"], 1);
}

#[test]
fn homology_of_the_hollow_triangle() {
    let (code, v) = run(&triangle(), &["homology", "--dim", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["rank"], 1);
}
