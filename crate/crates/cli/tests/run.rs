use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use phimin_cli::{parse_config, run, RunOptions, RunOutcome};

fn config(name: &str) -> phimin_cli::RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    parse_config(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run_in(name: &str, dir: &Path) -> RunOutcome {
    let opts = RunOptions {
        out: Some(dir.to_path_buf()),
        ..RunOptions::default()
    };
    run(&config(name), &opts).unwrap()
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap()
}

fn json(dir: &Path, file: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, file)).unwrap()
}

/// Every artifact except the manifest, by file name.
fn artifacts(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (PathBuf::from(p.file_name().unwrap()), std::fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn grim_reaper_profile_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in("grim_reaper.json", dir.path());
    assert_eq!(out.exit_code(), 0);
    let csv = read(dir.path(), "profile.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,x,z,theta,k1,k2,H,K,eta,mu"));
    let mut max_dev = 0.0f64;
    let mut reach = 0.0f64;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 10);
        let (x, z) = (cols[1], cols[2]);
        if x.abs() <= 1.4 {
            max_dev = max_dev.max((z + x.cos().ln()).abs());
        }
        reach = reach.max(x.abs());
    }
    assert!(reach >= 1.4, "profile reaches only |x| = {reach}");
    assert!(max_dev <= 1e-6, "max deviation {max_dev:e}");
    assert_eq!(read(dir.path(), "audit.json").trim(), "[]");
}

#[test]
fn bowl_area_audit_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in("bowl_area.json", dir.path());
    assert_eq!(out.exit_code(), 0);
    let area = json(dir.path(), "area.json");
    assert_eq!(area["hypothesis_ok"], true);
    assert_eq!(area["passed"], true);
    assert!(area["disk_area"].as_f64().unwrap() < area["bound"].as_f64().unwrap());
    assert!(out.records.iter().all(|r| r.passed));
}

#[test]
fn catenoid_convexity_is_reported_not_asserted() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in("catenoid_convexity.json", dir.path());
    assert_eq!(out.exit_code(), 0);
    let report = json(dir.path(), "convexity.json");
    assert_eq!(report["verdict"], "HypothesesFail");
    assert!(report["min_k"].as_f64().unwrap() < 0.0);
}

#[test]
fn wing_patch_fails_the_convexity_audit() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in("wing_patch_convexity.json", dir.path());
    assert_eq!(out.exit_code(), 1);
    assert!(out.records.iter().any(|r| !r.passed));
    let audit = json(dir.path(), "audit.json");
    assert!(audit.as_array().unwrap().iter().any(|r| r["passed"] == false));
}

#[test]
fn manifest_lists_every_artifact_with_its_hash() {
    let dir = tempfile::tempdir().unwrap();
    run_in("bowl_density.json", dir.path());
    let manifest = json(dir.path(), "manifest.json");
    let listed = manifest["artifacts"].as_array().unwrap();
    assert_eq!(listed.len(), artifacts(dir.path()).len());
    for a in listed {
        let bytes = std::fs::read(dir.path().join(a["path"].as_str().unwrap())).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(a["sha256"].as_str().unwrap(), hex);
        assert_eq!(a["bytes"].as_u64().unwrap(), bytes.len() as u64);
    }
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["config"]["command"], "AuditMonotonicity");
}

#[test]
fn seed_override_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out: Some(dir.path().to_path_buf()),
        seed: Some(99),
        verbose: false,
    };
    run(&config("quadratic_potential_check.json"), &opts).unwrap();
    assert_eq!(json(dir.path(), "manifest.json")["config"]["seed"], 99);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for name in ["bowl_stability.json", "bowl_graph_export.json", "bowl_blowup.json"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_in(name, a.path());
        run_in(name, b.path());
        assert_eq!(artifacts(a.path()), artifacts(b.path()), "{name}");
    }
}

#[test]
fn graph_export_writes_every_format() {
    let dir = tempfile::tempdir().unwrap();
    run_in("bowl_graph_export.json", dir.path());
    let csv = read(dir.path(), "graph.csv");
    assert_eq!(csv.lines().next(), Some("i,j,x,y,u,H,K,k1,k2,eta"));
    // A 17 x 17 grid over [-0.5, 0.5]^2 at h = 1/16.
    let obj = read(dir.path(), "graph.obj");
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 17 * 17);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 16 * 16);
    assert_eq!(csv.lines().count(), 1 + 17 * 17);
}

#[test]
fn non_convergence_is_an_error() {
    let text = r#"{
        "potential": {"family": "Linear", "slope": 1, "alpha": -1e9},
        "command": "SolveGraph",
        "params": {
            "domain": {"x0": -0.5, "x1": 0.5, "y0": -0.5, "y1": 0.5},
            "h": 0.0625,
            "boundary": {"rotational_profile": {"start": {"axis": {"z0": 0}}, "s_max": 1, "step": 1e-3}},
            "newton": {"tol": 1e-14, "max_iters": 1}
        }
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out: Some(dir.path().to_path_buf()),
        ..RunOptions::default()
    };
    let e = run(&parse_config(text).unwrap(), &opts).unwrap_err();
    assert!(e.to_string().starts_with("solvers:"), "{e}");
}
