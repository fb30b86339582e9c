// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chiralring"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

const SMATRIX: &str = "experiment = \"smatrix\"\n[smatrix]\npoints = 301\n";

#[test]
fn smatrix_run_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.toml", SMATRIX);
    let out = run(&cfg, tmp.path(), &["--threads", "1"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = PathBuf::from(String::from_utf8(out.stdout).unwrap().trim());
    assert!(dir.starts_with(tmp.path().join("smatrix")));
    let csv = fs::read_to_string(dir.join("data.csv")).unwrap();
    assert_eq!(csv.lines().count(), 302);
    assert!(csv.starts_with("omega,p1,p2,p3,"));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("meta.json")).unwrap()).unwrap();
    assert_eq!(
        meta["config_hash"].as_str().unwrap(),
        dir.file_name().unwrap().to_str().unwrap()
    );
    assert_eq!(meta["config"]["smatrix"]["gamma"], 0.35);
    assert_eq!(meta["threads"], 1);
    assert!(meta["summary"]["max_unitarity_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let text =
        "experiment = \"spectrum\"\n[grid]\nl = 12\n[spectrum]\npoints = 13\nratios = [10.0]\n";
    let cfg = write(tmp.path(), "sp.toml", text);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(run(&cfg, &a, &[]).status.success());
    assert!(run(&cfg, &b, &["--threads", "2"]).status.success());
    let find = |root: &Path| {
        let d = fs::read_dir(root.join("spectrum"))
            .unwrap()
            .next()
            .unwrap()
            .unwrap()
            .path();
        fs::read(d.join("data.csv")).unwrap()
    };
    assert_eq!(find(&a), find(&b));
    // A second run into the same directory is accepted.
    assert!(run(&cfg, &a, &[]).status.success());
}

#[test]
fn seed_override_changes_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.toml", SMATRIX);
    let a = run(&cfg, tmp.path(), &[]);
    let b = run(&cfg, tmp.path(), &["--seed", "42"]);
    assert_ne!(a.stdout, b.stdout);
    let dir = PathBuf::from(String::from_utf8(b.stdout).unwrap().trim());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 42);
    assert_eq!(meta["solver_seed"], 42);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        "experiment = \"quench\"\n[ring]\ne_jj = 1.0\n",
        "experiment = \"warp\"\n",
        "experiment = \"spectrum\"\n[grid]\nl = 25\n",
        "experiment = \"effective\"\n[effective]\ng = 0.5\n[effective.coupling]\ne_j_r = 1.0\ne_n = 50.0\nn = 1\n",
        "experiment = \"smatrix\"\n[smatrix]\ngamma = -1.0\n",
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = write(tmp.path(), &format!("bad{i}.toml"), text);
        let out = run(&cfg, tmp.path(), &[]);
        assert_eq!(
            out.status.code(),
            Some(2),
            "case {i}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = run(&tmp.path().join("missing.toml"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("--bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_key_diagnostic_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.toml",
        "experiment = \"quench\"\n\n[ring]\ne_jj = 1.0\n",
    );
    let out = run(&cfg, tmp.path(), &[]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("e_jj"), "{err}");
    assert!(
        err.contains("line 4") || err.contains(":4:") || err.contains("4 |"),
        "{err}"
    );
}

#[test]
fn hash_mismatch_on_resume_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.toml", SMATRIX);
    let out = run(&cfg, tmp.path(), &[]);
    let dir = PathBuf::from(String::from_utf8(out.stdout).unwrap().trim());
    fs::write(dir.join("meta.json"), "{\"config_hash\": \"0000\"}").unwrap();
    assert_eq!(run(&cfg, tmp.path(), &[]).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "experiment = \"quench\"\n[grid]\nl = 24\n[eigen]\ntol = 1e-300\nmax_basis = 4\nmax_restarts = 1\n";
    let cfg = write(tmp.path(), "q.toml", text);
    let out = run(&cfg, tmp.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("caused by"));
}

#[test]
fn verify_adds_dense_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let text =
        "experiment = \"quench\"\n[ring]\ne_c = 1.0\n[grid]\nl = 24\n[quench]\nperiods = 1.0\n";
    let cfg = write(tmp.path(), "q.toml", text);
    let out = run(&cfg, tmp.path(), &["--verify"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = PathBuf::from(String::from_utf8(out.stdout).unwrap().trim());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("meta.json")).unwrap()).unwrap();
    let v = &meta["verify"];
    assert!(
        v["max_relative_eigenvalue_error"].as_f64().unwrap() < 1e-8,
        "{v}"
    );
    assert!(v["max_state_error"].as_f64().unwrap() < 1e-8, "{v}");
}

#[test]
fn every_shipped_config_parses() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let cfg = chiralring_cli::ExperimentConfig::load(&path).unwrap();
        cfg.validate().unwrap();
        seen += 1;
    }
    assert!(seen >= 7);
}
