// Copyright 2026 The unruh-preth Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_unruh-preth"));
    c.env_remove("UNRUH_PRETH_OUT");
    c
}

fn scenario_path(name: &str) -> String {
    format!("{}/../../scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn summary(out: &Output) -> serde_json::Value {
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 1, "stdout: {stdout}");
    serde_json::from_str(lines[0]).unwrap()
}

#[test]
fn run_writes_into_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", &scenario_path("fig1_spectrum"), "--out"])
        .arg(dir.path())
        .args(["--threads", "1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&out);
    assert_eq!(s["scenario"], "fig1_spectrum");
    assert_eq!(s["rows_written"], 64);
    assert!(dir.path().join("fig1_spectrum/spectrum.csv").is_file());
    assert!(!out.stderr.is_empty());
}

#[test]
fn environment_sets_default_and_flag_wins() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("UNRUH_PRETH_OUT", env_dir.path())
        .args(["run", "steady"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.path().join("steady/steady.csv").is_file());
    let out = bin()
        .env("UNRUH_PRETH_OUT", env_dir.path())
        .args(["run", "lifetime", "--out"])
        .arg(flag_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(flag_dir.path().join("lifetime/lifetime.csv").is_file());
    assert!(!Path::new(&env_dir.path().join("lifetime")).exists());
}

#[test]
fn list_names_every_bundled_scenario() {
    let out = bin().arg("list-scenarios").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig1_spectrum", "fig2_panel", "fig3_scaling", "fig4_entropy", "fig5_cascade", "fig6_contour"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from {text}");
    }
}

#[test]
fn validate_accepts_and_rejects() {
    let out = bin().args(["validate", &scenario_path("fig5_cascade")]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(summary(&out)["valid"], true);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name":"bad","mode":"teleport"}"#).unwrap();
    let out = bin().arg("validate").arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn run_failure_has_nonzero_status() {
    let out = bin().args(["run", "/nonexistent/scenario.json"]).output().unwrap();
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
}
