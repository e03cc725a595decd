use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn profile(name: &str) -> String {
    root().join("profiles").join(name).display().to_string()
}

fn btwist(args: &[&str]) -> Output {
    btwist_env(args, &[])
}

fn btwist_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_btwist"));
    cmd.args(args).env_remove("BTWIST_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn btwist")
}

fn ok(args: &[&str]) -> String {
    let out = btwist(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(schema: &str, doc: &Value) {
    let schema = read_json(&root().join("docs/schemas").join(format!("{schema}.schema.json")));
    let validator = jsonschema::draft202012::new(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}");
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_owned()
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn classify_p2_is_in_rb_tilde() {
    let v: Value = serde_json::from_str(&ok(&["classify", &profile("p2.json"), "--epsilon", "0.5"])).unwrap();
    assert_eq!(v["in_RB_tilde"], Value::Bool(true));
    assert_valid("class_report", &v);
}

#[test]
fn billiard_scan_has_xi_intervals() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().display().to_string();
    let stdout = ok(&["criterion-scan", &profile("p2.json"), "--mode", "billiard", "--out", &out]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert!(!v["xi_intervals"].as_array().unwrap().is_empty());
    assert_valid("verdict", &v);
    assert_eq!(read_json(&dir.path().join("verdict.json")), v);
    assert_eq!(header(&dir.path().join("scan.csv")), "omega,a_low,a_up,F,F_noA,in_xi");
    let rows = fs::read_to_string(dir.path().join("scan.csv")).unwrap().lines().count();
    assert_eq!(rows, 4097);
}

#[test]
fn diameter_orbit_impact_times() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().display().to_string();
    let args = ["simulate", &profile("p0.json"), "--r", "1", "--theta", "3.14159", "--vr", "1", "--vtheta", "0", "--bounces", "5"];
    let stdout = ok(&[&args[..], &["--out", &out]].concat());
    let mut reader = csv::Reader::from_reader(stdout.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["n", "time", "angle", "vr_in", "vr_out", "c", "energy_in", "energy_out"]
    );
    let times: Vec<f64> = reader.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(times.len(), 5);
    for (n, t) in times.iter().enumerate() {
        assert!((t - 2.0 * (n + 1) as f64).abs() < 1e-9, "{times:?}");
    }
    assert_eq!(fs::read_to_string(dir.path().join("events.csv")).unwrap(), stdout);
    assert_valid("simulate_summary", &read_json(&dir.path().join("simulate_summary.json")));
}

#[test]
fn every_json_artifact_matches_its_schema() {
    let dir = TempDir::new().unwrap();
    let p2 = profile("p2.json");
    let run = |sub: &str, extra: &[&str]| {
        let out = dir.path().join(sub);
        let out = out.display().to_string();
        ok(&[&[sub, p2.as_str()][..], extra, &["--out", &out]].concat());
        dir.path().join(sub)
    };
    let strip = ["--tau-min", "1", "--tau-max", "13.7"];

    let d = run("twist-check", &[&strip[..], &["--c", "0.01", "--grid", "64", "--samples", "50", "--bands", "2,3,12,13", "--dump-jets"]].concat());
    assert_valid("twist_report", &read_json(&d.join("twist_report.json")));
    assert_eq!(header(&d.join("jets.csv")), "t0,tau,value,d1,d2,d11,d12,d22");

    let d = run("convergence", &[]);
    let v = read_json(&d.join("convergence_report.json"));
    assert_valid("convergence_report", &v);
    assert!(v["report"]["slope"].as_f64().unwrap() >= 0.9);

    let d = run("orbit", &[&strip[..], &["--tau", "5", "--n", "120"]].concat());
    let v = read_json(&d.join("orbit_summary.json"));
    assert_valid("orbit_summary", &v);
    assert_eq!(header(&d.join("orbit.csv")), "n,t_lift,t_mod1,K,tau,del_residual");
    assert!(v["rotation_number"].is_number());

    let d = run("minimize", &[&strip[..], &["--p", "25", "--q", "2"]].concat());
    assert_valid("configuration", &read_json(&d.join("configuration.json")));
    assert_eq!(header(&d.join("configuration.csv")), "n,t_lift,t_mod1,gap,del_residual");

    let d = run("mather-probe", &[&strip[..], &["--omega", "11.618033988749895", "--depth", "4"]].concat());
    assert_valid("mather_probe", &read_json(&d.join("mather_probe.json")));

    let d = run("bound-check", &[&strip[..], &["--p", "25", "--q", "2"]].concat());
    assert_valid("bound_report", &read_json(&d.join("bound_report.json")));

    let d = run("simulate", &["--ensemble", "3", "--bounces", "20"]);
    assert_valid("simulate_summary", &read_json(&d.join("simulate_summary.json")));
    assert_eq!(header(&d.join("events_0002.csv")), "n,time,angle,vr_in,vr_out,c,energy_in,energy_out");

    for p in ["p0.json", "p1.json", "p2.json"] {
        assert_valid("profile", &read_json(&root().join("profiles").join(p)));
    }
}

#[test]
fn constant_profile_reports_infinite_sigma() {
    let v: Value = serde_json::from_str(&ok(&["classify", &profile("p0.json"), "--grid", "256"])).unwrap();
    assert_eq!(v["sigmaB"], "inf");
    assert_valid("class_report", &v);
    let v: Value = serde_json::from_str(&ok(&["criterion-scan", &profile("p0.json"), "--grid", "256"])).unwrap();
    assert_eq!(v["truncated"], true);
    assert_valid("verdict", &v);
}

#[test]
fn identical_config_and_seed_are_byte_identical() {
    let runs: Vec<Vec<(String, Vec<u8>)>> = (0..2)
        .map(|_| {
            let dir = TempDir::new().unwrap();
            let p2 = profile("p2.json");
            for (sub, extra) in [
                ("twist-check", vec!["--c", "0.01", "--tau-min", "1", "--tau-max", "13.7", "--grid", "64", "--samples", "200", "--seed", "11", "--dump-jets"]),
                ("simulate", vec!["--ensemble", "6", "--bounces", "30", "--seed", "11"]),
                ("criterion-scan", vec!["--mode", "billiard", "--grid", "512"]),
            ] {
                let out = dir.path().join(sub).display().to_string();
                ok(&[&[sub, p2.as_str()][..], &extra, &["--out", &out]].concat());
            }
            ["twist-check", "simulate", "criterion-scan"].iter().flat_map(|s| dir_contents(&dir.path().join(s))).collect()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn different_seeds_give_different_ensembles() {
    let p2 = profile("p2.json");
    let a = ok(&["simulate", &p2, "--ensemble", "2", "--bounces", "5", "--seed", "1"]);
    let b = ok(&["simulate", &p2, "--ensemble", "2", "--bounces", "5", "--seed", "2"]);
    assert_ne!(a, b);
}

#[test]
fn thread_count_does_not_change_output() {
    let p2 = profile("p2.json");
    let args = ["simulate", &p2, "--ensemble", "8", "--bounces", "30", "--seed", "5"];
    let one = btwist_env(&args, &[("BTWIST_THREADS", "1")]);
    let four = btwist_env(&args, &[("BTWIST_THREADS", "4")]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);

    let bad = btwist_env(&args, &[("BTWIST_THREADS", "zero")]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_list_flags() {
    let out = btwist(&["classify", &profile("p2.json"), "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("--epsilon") && err.contains("--critical-point-mode"), "{err}");

    let out = btwist(&["twist-check", &profile("p2.json"), "--bands", "2,3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Usage"));

    assert_eq!(btwist(&[]).status.code(), Some(1));
    assert_eq!(btwist(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(btwist(&["--help"]).status.code(), Some(0));
    assert_eq!(btwist(&["simulate", &profile("p0.json"), "--r", "1"]).status.code(), Some(1));
}

#[test]
fn bad_inputs_exit_one_with_error_names() {
    let dir = TempDir::new().unwrap();
    let out = btwist(&["classify", "/nonexistent/profile.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error: Io:"));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"mean": 1.0, "harmonic": []}"#).unwrap();
    let out = btwist(&["classify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error: ProfileFormat:"));

    let neg = dir.path().join("neg.json");
    fs::write(&neg, r#"{"mean": 1.0, "harmonics": [[2.0, 0.0]]}"#).unwrap();
    let out = btwist(&["classify", neg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: "));

    let out = btwist(&["classify", &profile("p2.json"), "--epsilon", "1.5"]);
    assert_eq!(out.status.code(), Some(1));

    let out = btwist(&["orbit", &profile("p2.json"), "--tau", "50", "--tau-min", "1", "--tau-max", "13.7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("OutOfStrip"));
}

#[test]
fn invariant_violations_exit_two() {
    let dir = TempDir::new().unwrap();
    let wavy = dir.path().join("wavy.json");
    fs::write(&wavy, r#"{"mean": 1.0, "harmonics": [[0.05, 0.0]]}"#).unwrap();
    let out = btwist(&["twist-check", wavy.to_str().unwrap(), "--tau-min", "0.5", "--tau-max", "3", "--bands", "0.6,0.7,2.9,2.95"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error: ExtensionFailed:"));

    let out = btwist(&["minimize", &profile("p2.json"), "--p", "25", "--q", "2", "--tau-min", "1", "--tau-max", "14", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error: ToleranceExceeded:"));
}

#[test]
fn early_orbit_stop_is_reported_not_fatal() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().display().to_string();
    let stdout = ok(&["orbit", &profile("p2.json"), "--k", "5", "--tau-min", "1", "--tau-max", "2", "--out", &out]);
    assert_eq!(stdout.lines().count(), 2);
    let v = read_json(&dir.path().join("orbit_summary.json"));
    assert_eq!(v["stop"], "NoRootInStrip");
    assert_valid("orbit_summary", &v);
}
