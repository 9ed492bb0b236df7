use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lab::{ExitKind, Failure};
use lab_core::LabError;
use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("LAB_THREADS", "2")
        .output()
        .expect("lab runs")
}

fn run_dir(o: &Output) -> PathBuf {
    PathBuf::from(String::from_utf8(o.stdout.clone()).unwrap().trim())
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn config(name: &str) -> String {
    configs().join(name).display().to_string()
}

#[test]
fn region_default_run_writes_store_entry() {
    let tmp = TempDir::new().unwrap();
    let o = lab(&["region"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = run_dir(&o);
    assert!(dir.file_name().unwrap().to_str().unwrap().starts_with("region-"));
    for f in ["manifest.json", "config.json", "region.csv", "polygon.csv", "region.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let m = manifest(&dir);
    assert_eq!(m["schema"], 1);
    assert_eq!(m["status"], "pass");
    assert_eq!(m["exit_code"], 0);
    let csv = fs::read_to_string(dir.join("region.csv")).unwrap();
    assert!(csv.starts_with("inv_r,s,theta,gamma,admissible,branch"));
}

#[test]
fn store_is_append_only() {
    let tmp = TempDir::new().unwrap();
    let a = run_dir(&lab(&["region", "--config", &config("region_mhd.json")], tmp.path()));
    let before = fs::read(a.join("manifest.json")).unwrap();
    let b = run_dir(&lab(&["region", "--config", &config("region_mhd.json")], tmp.path()));
    assert_ne!(a, b);
    assert!(b.display().to_string().ends_with("-1"));
    assert_eq!(fs::read(a.join("manifest.json")).unwrap(), before);
    assert_eq!(manifest(&a)["config_digest"], manifest(&b)["config_digest"]);
}

#[test]
fn region_points_report_verdicts() {
    let tmp = TempDir::new().unwrap();
    let o = lab(&["region", "--config", &config("region_nse.json")], tmp.path());
    let dir = run_dir(&o);
    let pts = fs::read_to_string(dir.join("points.csv")).unwrap();
    assert_eq!(pts.lines().count(), 4);
    assert!(pts.contains("branch1") && pts.contains("branch2"));
}

#[test]
fn strict_boundaries_change_the_digest() {
    let tmp = TempDir::new().unwrap();
    let a = run_dir(&lab(&["region"], tmp.path()));
    let b = run_dir(&lab(&["region", "--strict-boundaries"], tmp.path()));
    assert_ne!(manifest(&a)["config_digest"], manifest(&b)["config_digest"]);
}

#[test]
fn invalid_theta_exits_2() {
    let tmp = TempDir::new().unwrap();
    let o = lab(&["construct", "--config", &config("construct_bad_theta.json")], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let m = manifest(&run_dir(&o));
    assert_eq!(m["reason_code"], "theta_le_3_2");
}

#[test]
fn missing_or_malformed_config_exits_2() {
    let tmp = TempDir::new().unwrap();
    let o = lab(&["verify", "--config", "/nonexistent/cfg.json"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"construction": {"mode": "NSE", "theta": 2.0, "J": 3}, "bogus": 1}"#).unwrap();
    let o = lab(&["verify", "--config", bad.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = lab(&["verify"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn coarse_grid_exits_3() {
    let tmp = TempDir::new().unwrap();
    let o = lab(&["construct", "--config", &config("construct_low_res.json")], tmp.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn too_few_shells_exit_4() {
    let tmp = TempDir::new().unwrap();
    let o = lab(&["verify", "--config", &config("verify_short.json")], tmp.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn oversized_step_exits_7() {
    let tmp = TempDir::new().unwrap();
    let o = lab(&["simulate", "--config", &config("simulate_cfl_reject.json")], tmp.path());
    assert_eq!(o.status.code(), Some(7));
    assert_eq!(manifest(&run_dir(&o))["exit_code"], 7);
}

#[test]
fn construct_writes_blocks_and_norms() {
    let tmp = TempDir::new().unwrap();
    let o = lab(&["construct", "--config", &config("construct_nse.json")], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = run_dir(&o);
    for f in ["blocks.json.gz", "norms.csv", "norms.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
}

#[test]
fn simulate_seed_check_and_report() {
    let tmp = TempDir::new().unwrap();
    let o = lab(&["simulate", "--config", &config("simulate_diffusion.json"), "--seed-check"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = run_dir(&o);
    let m = manifest(&dir);
    assert_eq!(m["seed_check"]["reproduced"], true);
    assert!(m["seed_check"]["compared"].as_u64().unwrap() > 10);
    for f in ["history.csv", "history.json", "summary.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }

    let mpath = dir.join("manifest.json");
    let r1 = lab(&["report", "--config", mpath.to_str().unwrap()], tmp.path());
    assert_eq!(r1.status.code(), Some(0), "{}", String::from_utf8_lossy(&r1.stderr));
    let r2 = lab(&["report", "--config", mpath.to_str().unwrap()], tmp.path());
    let (d1, d2) = (run_dir(&r1), run_dir(&r2));
    assert_ne!(d1, d2);
    let text = fs::read_to_string(d1.join("report.txt")).unwrap();
    assert_eq!(text, fs::read_to_string(d2.join("report.txt")).unwrap());
    assert!(text.contains("energy_balance"));
    assert!(d1.join("shell_energy.csv").exists());

    fs::remove_file(dir.join("history.csv")).unwrap();
    let r3 = lab(&["report", "--config", mpath.to_str().unwrap()], tmp.path());
    assert_eq!(r3.status.code(), Some(6));
}

#[test]
fn report_without_manifest_exits_6() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nothing/manifest.json");
    let o = lab(&["report", "--config", missing.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn error_kinds_map_to_exit_codes() {
    let cases = [
        (LabError::InvalidParameter("x".into()), 2),
        (LabError::Resolution { needed: 9, available: 4 }, 3),
        (LabError::SupportBudget { work: 2, budget: 1 }, 3),
        (LabError::InsufficientData { got: 2, required: 3 }, 4),
        (LabError::BlowUp { t: 1.0, what: "energy".into() }, 5),
        (LabError::StepRejected { cfl: 0.9, limit: 0.5 }, 7),
    ];
    for (e, code) in cases {
        assert_eq!(Failure::from(e.clone()).kind.code(), code, "{e}");
    }
    assert_eq!(ExitKind::Ok.code(), 0);
    assert_eq!(ExitKind::CheckFailed.code(), 1);
    assert_eq!(ExitKind::MissingArtifact.code(), 6);
}
