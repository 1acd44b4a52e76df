use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use sphereflow::geometry::{Chart, GraphField};
use sphereflow::profile::save_profile;

fn sphereflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphereflow")).args(args).output().expect("binary runs")
}

fn write_doc(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

const BALL: &str = r#"{
  "curvature": {"family": "mean", "p": 1},
  "geometry": {"chart": "axisym", "n": 2, "N": 64, "initial": {"ball": 0.5235987755982988}},
  "flow": {"record_every": 500},
  "output": {"trace_path": "ball.csv", "report_path": "ball.json", "snapshot_every": 4}
}"#;

#[test]
fn round_run_reports_blowup_time() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(dir.path(), "run.json", BALL);
    let out = sphereflow(&["run-flow", &doc]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "ball.json");
    assert_eq!(r["status"], "ReachedEquator");
    let t_star = r["t_star_estimate"].as_f64().unwrap();
    assert!((t_star - 2.0 * 2f64.ln()).abs() < 1e-3, "T* estimate {t_star}");
    for key in
        ["t_stop", "u_max", "u_min", "grad_max", "certificate", "V", "W", "phi1", "phi2", "phi3", "slacks", "decay"]
    {
        assert!(r.get(key).is_some(), "report lacks {key}");
    }
    assert_eq!(r["config"]["geometry"]["N"], 64);
    assert!(files(dir.path()).iter().any(|f| f == "ball.snap00000.txt"));
    let csv = std::fs::read_to_string(dir.path().join("ball.csv")).unwrap();
    assert!(csv.starts_with("t,V0,V1,V2,"));
}

#[test]
fn identical_documents_give_identical_traces() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(dir.path(), "run.json", BALL);
    assert_eq!(sphereflow(&["run-flow", &doc]).status.code(), Some(0));
    let first = std::fs::read(dir.path().join("ball.csv")).unwrap();
    assert_eq!(sphereflow(&["run-flow", &doc]).status.code(), Some(0));
    assert_eq!(first, std::fs::read(dir.path().join("ball.csv")).unwrap());
}

#[test]
fn perturbed_run_reports_nonnegative_slacks() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(
        dir.path(),
        "run.json",
        r#"{"curvature": {"family": "mean", "p": 1},
            "geometry": {"n": 2, "N": 48, "initial": {"perturbed": {"base": 0.7, "amplitudes": [0.05]}}}}"#,
    );
    assert_eq!(sphereflow(&["run-flow", &doc]).status.code(), Some(0));
    let r = report(dir.path(), "report.json");
    for name in ["I", "II"] {
        let s = &r["slacks"][name];
        let (value, scale) = (s["value"].as_f64().unwrap(), s["scale"].as_f64().unwrap());
        assert!(value >= -1e-8 * scale, "slack {name} = {value}");
    }
}

#[test]
fn unreadable_documents_exit_2_without_outputs() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(sphereflow(&["run-flow", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = write_doc(dir.path(), "bad.json", "{\"curvature\": ");
    assert_eq!(sphereflow(&["run-flow", &bad]).status.code(), Some(2));
    let unknown = write_doc(dir.path(), "unknown.json", &BALL.replace("\"mean\"", "\"cubic\""));
    assert_eq!(sphereflow(&["run-flow", &unknown]).status.code(), Some(2));
    assert_eq!(files(dir.path()), ["bad.json", "unknown.json"]);
}

#[test]
fn nonconvex_initial_data_exits_3() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(
        dir.path(),
        "run.json",
        r#"{"curvature": {"family": "mean", "p": 1},
            "geometry": {"n": 2, "N": 64, "initial": {"perturbed": {"base": 1.0, "amplitudes": [0, 0, 0, 0, 0, 0.1]}}}}"#,
    );
    let out = sphereflow(&["run-flow", &doc]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("node"));
    assert_eq!(files(dir.path()), ["run.json"]);
}

#[test]
fn degenerate_run_exits_cleanly() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(
        dir.path(),
        "run.json",
        r#"{"curvature": {"family": "mean", "p": 1},
            "geometry": {"n": 1, "N": 64, "initial": {"perturbed": {"base": 0.7, "amplitudes": [0.05]}}},
            "flow": {"cfl": 0.99, "record_every": 1}}"#,
    );
    let out = sphereflow(&["run-flow", &doc]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "report.json");
    assert_eq!(r["status"], "CurvatureDegenerate");
    assert!(r["degenerate"]["node"].is_u64());
    assert_eq!(r["certificate"]["strictly_convex"], true);
}

#[test]
fn verify_ball_profile() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("ball.txt");
    save_profile(&GraphField::ball(Chart::Axisym, 2, 128, FRAC_PI_4).unwrap(), &path).unwrap();
    let out = sphereflow(&["verify", path.to_str().unwrap(), "--n", "2", "--chart", "axisym"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    for k in 0..3 {
        let v = r["V"][k].as_f64().unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-8, "V_{k} = {v}");
    }
    assert_eq!(r["certificate"]["strictly_convex"], true);
}

#[test]
fn verify_near_equator_profile_is_near_equality() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("eq.txt");
    save_profile(&GraphField::ball(Chart::Axisym, 3, 128, FRAC_PI_2 - 1e-3).unwrap(), &path).unwrap();
    let out = sphereflow(&["verify", path.to_str().unwrap(), "--n", "3", "--chart", "axisym"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let slacks = r["slacks"].as_object().unwrap();
    assert_eq!(slacks.len(), 3);
    for (name, s) in slacks {
        let (value, scale) = (s["value"].as_f64().unwrap(), s["scale"].as_f64().unwrap());
        assert!(value.abs() <= 1e-2 * scale, "slack {name} = {value}");
    }
}

#[test]
fn verify_rejects_bad_profiles() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("p.txt");
    save_profile(&GraphField::ball(Chart::Axisym, 2, 32, 0.5).unwrap(), &path).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(sphereflow(&["verify", p, "--n", "3", "--chart", "axisym"]).status.code(), Some(2));
    assert_eq!(sphereflow(&["verify", p, "--n", "2", "--chart", "sphere"]).status.code(), Some(2));

    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert_eq!(sphereflow(&["verify", p, "--n", "2", "--chart", "axisym"]).status.code(), Some(2));

    let wavy = GraphField::from_fn(Chart::Axisym, 2, 64, |t: f64| 1.0 + 0.1 * (6.0 * t).cos()).unwrap();
    save_profile(&wavy, &path).unwrap();
    let out = sphereflow(&["verify", p, "--n", "2", "--chart", "axisym"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not strictly convex at node"));
}

#[test]
fn property_suite_statuses() {
    let out = sphereflow(&["property-suite", "--seed", "1", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("inverse_concavity_form") && text.ends_with("result: pass\n"));
    assert_eq!(sphereflow(&["property-suite", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(sphereflow(&["property-suite", "--samples", "many"]).status.code(), Some(2));
}
