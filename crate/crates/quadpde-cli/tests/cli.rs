//! End-to-end tests of the `quadpde` binary: artifact layout, determinism,
//! and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadpde"))
}

fn write_cfg(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

const DIRICHLET_CFG: &str = r#"{
    "domain": "helm-1",
    "problem": "helmholtz",
    "bcs": [{"bc":"dirichlet"},{"bc":"dirichlet"},{"bc":"dirichlet"},{"bc":"dirichlet"}],
    "q": 8, "m": 40, "r_m": 2.0, "seed": 1
}"#;

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn solve_writes_artifacts_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), DIRICHLET_CFG);
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = bin()
            .args(["solve", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out_dir)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
        for name in ["summary.json", "solution.csv", "gridlines.csv"] {
            assert!(out_dir.join(name).is_file(), "missing {name}");
        }
    }
    // Bit-identical reruns.
    for name in ["summary.json", "solution.csv", "gridlines.csv"] {
        assert_eq!(
            std::fs::read(out_a.join(name)).unwrap(),
            std::fs::read(out_b.join(name)).unwrap(),
            "{name} differs between reruns"
        );
    }
    // The summary parses and carries the expected fields.
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("summary.json")).unwrap())
            .unwrap();
    assert!(v["metrics"]["e_rms"].as_f64().unwrap() > 0.0);
    assert_eq!(v["metrics"]["edges"].as_array().unwrap().len(), 4);
    assert!(v.get("wall_time_s").is_none());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // Missing file.
    let out = bin()
        .args(["solve", "--config", "/nonexistent.json"])
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    // Unknown domain.
    let cfg = write_cfg(tmp.path(), &DIRICHLET_CFG.replace("helm-1", "nope"));
    let out = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    // Invalid parameter.
    let cfg = write_cfg(tmp.path(), &DIRICHLET_CFG.replace("\"q\": 8", "\"q\": 1"));
    let out = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn map_audit_fails_on_folded_map() {
    let tmp = tempfile::tempdir().unwrap();
    // nlh-2 with a plain Coons patch folds; the designated map passes.
    let folded = r#"{
        "domain": "nlh-2",
        "map": {"map": "coons"},
        "problem": "nonlinear_helmholtz",
        "bcs": [{"bc":"dirichlet"},{"bc":"dirichlet"},{"bc":"dirichlet"},{"bc":"dirichlet"}],
        "q": 8, "m": 40, "r_m": 2.0, "seed": 1
    }"#;
    let cfg = write_cfg(tmp.path(), folded);
    let out = bin()
        .args(["map-audit", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 4, "stdout: {}", String::from_utf8_lossy(&out.stdout));

    let ok = folded.replace(r#""map": {"map": "coons"},"#, "");
    let cfg = write_cfg(tmp.path(), &ok);
    let out = bin()
        .args(["map-audit", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stdout: {}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn bc_audit_and_convergence_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), DIRICHLET_CFG);
    let out = bin()
        .args(["bc-audit", "--trials", "3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stdout: {}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));

    let out = bin()
        .args(["convergence", "--m", "20,40", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(tmp.path().join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("m,e_rms,e_max"));
}

#[test]
fn list_domains_names_all() {
    let out = bin().arg("list-domains").output().unwrap();
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    for name in ["helm-1", "helm-5", "nlh-2", "heat-3"] {
        assert!(text.contains(name), "missing {name}");
    }
    assert!(text.contains("coons_center"));
}
