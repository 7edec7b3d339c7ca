use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn run_ok(sub: &str, config: &Path, out_dir: &Path, extra: &[&str]) {
    let mut args = vec![
        sub,
        config.to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = qwalk(&args);
    assert!(out.status.success(), "{sub} failed: {}", stderr(&out));
}

const PAIR: &str = r#"{
    "steps": 200,
    "noise": {"kind": "binary-pair", "theta1": "pi/3", "theta2": "pi/4", "seed": 7},
    "realizations": 4
}"#;

#[test]
fn run_writes_series_fit_and_echo() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        "hadamard.json",
        r#"{"steps": 1000, "noise": {"kind": "homogeneous", "theta1": "pi/4"}}"#,
    );
    let out = tmp.path().join("out");
    run_ok("run", &config, &out, &[]);

    let csv = fs::read_to_string(out.join("sigma_series.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,sigma_mean,sigma_stderr");
    assert_eq!(csv.lines().count(), 1001);
    let fit = read_json(&out.join("fit.json"));
    let alpha = fit["alpha"].as_f64().unwrap();
    assert!((alpha - 1.0).abs() < 0.02, "alpha {alpha}");
    for key in ["stderr", "window", "r2"] {
        assert!(!fit[key].is_null(), "fit.json lacks {key}");
    }
    let echo = read_json(&out.join("config_echo.json"));
    assert_eq!(echo["noise"]["seed"], 0);
    assert_eq!(echo["lattice_size"], 2003);
}

#[test]
fn missing_steps_is_a_config_error_naming_the_key() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        "c.json",
        r#"{"noise": {"kind": "homogeneous", "theta1": 0.5}}"#,
    );
    let out = qwalk(&[
        "run",
        config.to_str().unwrap(),
        "-o",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("steps"), "{}", stderr(&out));
}

#[test]
fn unknown_keys_are_rejected_in_files_and_overrides() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "c.json", PAIR);
    let o = tmp.path().join("o");
    let out = qwalk(&[
        "run",
        config.to_str().unwrap(),
        "noise.colour=3",
        "-o",
        o.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("colour"));

    let bad = write_config(
        tmp.path(),
        "bad.json",
        r#"{"steps": 10, "stepz": 3, "noise": {"kind": "homogeneous", "theta1": 0.5}}"#,
    );
    let out = qwalk(&["run", bad.to_str().unwrap(), "-o", o.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "c.json", PAIR);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok("run", &config, &a, &[]);
    run_ok("run", &config, &b, &["--threads", "1"]);
    for name in [
        "sigma_series.csv",
        "moments.csv",
        "fit.json",
        "sigma_series.json",
        "config_echo.json",
    ] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn config_echo_reproduces_the_run() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "c.json", PAIR);
    let first = tmp.path().join("first");
    run_ok(
        "run",
        &config,
        &first,
        &["realizations=3", "noise.axis=temporal"],
    );
    let second = tmp.path().join("second");
    run_ok("run", &first.join("config_echo.json"), &second, &[]);
    for entry in fs::read_dir(&first).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            fs::read(first.join(&name)).unwrap(),
            fs::read(second.join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn scan_writes_table_and_rejects_empty_grid() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "c.json", PAIR);
    let out = tmp.path().join("scan");
    run_ok(
        "scan",
        &config,
        &out,
        &[r#"theta1_grid=["pi/4", "pi/3"]"#, "--format", "csv"],
    );
    let csv = fs::read_to_string(out.join("alpha_vs_theta1.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "theta1,alpha,alpha_stderr");
    assert_eq!(lines.len(), 3);
    // θ₁ = θ₂ is the homogeneous limit.
    let alpha: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((alpha - 1.0).abs() < 0.02, "alpha {alpha}");
    assert!(!out.join("alpha_vs_theta1.json").exists());

    let empty = qwalk(&[
        "scan",
        config.to_str().unwrap(),
        "theta1_grid=[]",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(empty.status.code(), Some(2));
    let range = qwalk(&[
        "scan",
        config.to_str().unwrap(),
        r#"theta1_grid={"start": 1.0, "stop": 1.0, "step": 0.1}"#,
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(range.status.code(), Some(2));
}

#[test]
fn fss_writes_scaling_and_rejects_single_size() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "c.json", PAIR);
    let out = tmp.path().join("fss");
    run_ok(
        "fss",
        &config,
        &out,
        &["sizes=[1001, 1501]", "realizations=2"],
    );
    let csv = fs::read_to_string(out.join("sigma_vs_N.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "N,sigma_bar,stderr");
    assert_eq!(csv.lines().count(), 3);
    let scaling = read_json(&out.join("scaling_fit.json"));
    assert!(scaling["slope"].as_f64().unwrap().is_finite());

    let single = qwalk(&[
        "fss",
        config.to_str().unwrap(),
        "sizes=[1001]",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(single.status.code(), Some(2));
}

#[test]
fn profile_writes_distribution_and_tail_fit() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        "c.json",
        r#"{
            "steps": 300,
            "noise": {"kind": "random-binary", "theta1": "pi/3", "theta2": "pi/4", "seed": 1},
            "realizations": 8,
            "tail_region": [5, 40]
        }"#,
    );
    let out = tmp.path().join("profile");
    run_ok("profile", &config, &out, &[]);
    let csv = fs::read_to_string(out.join("profile.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n_relative,probability_mean");
    assert_eq!(csv.lines().count(), 1 + 603);
    let total: f64 = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
    let tail = read_json(&out.join("tail_fit.json"));
    assert!(tail["decay_rate"].as_f64().unwrap() > 0.0);
    assert!(!tail["r_squared"].is_null());
}

#[test]
fn random_baseline_goes_to_a_subdirectory() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "c.json", PAIR);
    let out = tmp.path().join("o");
    run_ok("run", &config, &out, &["--with-random-baseline"]);
    let echo = read_json(&out.join("random_baseline").join("config_echo.json"));
    assert_eq!(echo["noise"]["kind"], "random-binary");
    assert!(out.join("random_baseline").join("fit.json").exists());
}

#[test]
fn failure_classes_map_to_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.json");
    let o = tmp.path().join("o");
    let out = qwalk(&["run", missing.to_str().unwrap(), "-o", o.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    let malformed = write_config(tmp.path(), "m.json", "{ not json");
    let out = qwalk(&[
        "run",
        malformed.to_str().unwrap(),
        "-o",
        o.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Tail region beyond the light cone holds no probability.
    let config = write_config(tmp.path(), "c.json", PAIR);
    let out = qwalk(&[
        "profile",
        config.to_str().unwrap(),
        "tail_region=[400, 450]",
        "-o",
        o.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));

    // Output directory below a regular file cannot be created.
    let blocker = write_config(tmp.path(), "file", "");
    let out = qwalk(&[
        "run",
        config.to_str().unwrap(),
        "-o",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}
