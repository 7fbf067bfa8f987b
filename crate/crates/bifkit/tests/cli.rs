//! End-to-end runs of the `bifkit` binary: flags, exit codes, and file
//! output checks.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bifkit"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bifkit-bin-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn spectrum_writes_curves_and_reruns_identically() {
    let dir = tmpdir("spectrum");
    let out = run(&["--out", dir.to_str().unwrap(), "spectrum", "--lambda-max", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bif = std::fs::read_to_string(dir.join("bifurcation_points.csv")).unwrap();
    assert!(bif.starts_with("mu,lambda,n,base_mode,parity\n"));
    // 8 curves with lambda(0) in {0,1,1,2,4,4,5,5}
    let starts: Vec<&str> = bif.lines().filter(|l| l.starts_with("0,")).collect();
    assert_eq!(starts.len(), 8);

    let first = bif.clone();
    let out = run(&["--out", dir.to_str().unwrap(), "spectrum", "--lambda-max", "6"]);
    assert!(out.status.success());
    let second = std::fs::read_to_string(dir.join("bifurcation_points.csv")).unwrap();
    assert_eq!(first, second);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn coeffs_emits_the_record_on_stdout() {
    let dir = tmpdir("coeffs");
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "--grid",
        "48",
        "coeffs",
        "--n",
        "0",
        "--k",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"kind\": \"double\""));
    assert!(text.contains("\"c2_candidates\""));
    assert!(text.contains("\"d_discrepancy\": true"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn corrupted_config_exits_one_before_computing() {
    let dir = tmpdir("badcfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "grid_n = banana\n").unwrap();
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "spectrum",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.join("bifurcation_points.csv").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn invalid_point_is_a_validation_failure() {
    let dir = tmpdir("badpoint");
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "--grid",
        "32",
        "coeffs",
        "--n",
        "2",
        "--k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn diagram_produces_svg_and_json() {
    let dir = tmpdir("diagram");
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "--grid",
        "32",
        "diagram",
        "--n",
        "1",
        "--k",
        "2",
        "--nu",
        "0.05",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("diagram_n1_k2.svg").exists());
    assert!(dir.join("diagram_n1_k2.json").exists());
    let json = std::fs::read_to_string(dir.join("diagram_n1_k2.json")).unwrap();
    assert!(json.contains("\"mixed_symmetry_preserved\": true"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn trace_rejects_unknown_branch() {
    let dir = tmpdir("trace");
    let out = run(&[
        "--out",
        dir.to_str().unwrap(),
        "--grid",
        "32",
        "trace",
        "--n",
        "0",
        "--k",
        "1",
        "--branch",
        "sideways",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("pure-phi1"), "lists available branches: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}
