//! Exit codes and output files of the command-line binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn qaoa_depth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qaoa-depth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn solve_reaching_target_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let inst = data("maxcut7.txt");
    let res = qaoa_depth(&[
        "solve",
        "--instance",
        inst.to_str().unwrap(),
        "--lambda",
        "0.432",
        "--tol",
        "0",
        "--max-iters",
        "40",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 42);
    assert!(
        text.starts_with("iter,phase,f,F,r,active_depth,l1_length,evals,accepted_extrapolation\n")
    );
    assert!(dir.path().join("run.schedule.json").exists());
}

#[test]
fn solve_missing_target_exits_two() {
    let inst = data("maxcut7.txt");
    let res = qaoa_depth(&[
        "solve",
        "--instance",
        inst.to_str().unwrap(),
        "--lambda",
        "2",
        "--max-iters",
        "30",
    ]);
    assert_eq!(code(&res), 2);
}

#[test]
fn errors_exit_one() {
    let res = qaoa_depth(&["solve", "--instance", "/no/such/instance.txt"]);
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).contains("/no/such/instance.txt"));

    let inst = data("maxcut7.txt");
    let res = qaoa_depth(&["solve", "--instance", inst.to_str().unwrap(), "--eta", "-1"]);
    assert_eq!(code(&res), 1);

    let res = qaoa_depth(&[
        "solve",
        "--instance",
        inst.to_str().unwrap(),
        "--lambda",
        "1",
        "--lambda-grid",
        "2,1",
    ]);
    assert_eq!(code(&res), 1);

    let res = qaoa_depth(&["frobnicate"]);
    assert_eq!(code(&res), 1);
}

#[test]
fn malformed_instance_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "nodes 3\nedge 0 1 0.5\nedge 1 x 0.2\n").unwrap();
    let res = qaoa_depth(&["oracle", "--instance", bad.to_str().unwrap()]);
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).contains(":3:"));
}

#[test]
fn oracle_prints_extrema() {
    let inst = data("maxcut7.txt");
    let res = qaoa_depth(&["oracle", "--instance", inst.to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("c_min -5.17"));
    assert!(stdout.contains("c_max 5.17"));
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        "# sweep settings\nlambda = 0.432\ntol = 0\nmax_iters = 50\nformat = json\n",
    )
    .unwrap();
    let inst = data("maxcut7.txt");
    let res = qaoa_depth(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--instance",
        inst.to_str().unwrap(),
        "--max-iters",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    // 10 iterations are not enough to reach 0.9 from the uniform start.
    assert_eq!(code(&res), 2, "{}", String::from_utf8_lossy(&res.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(json["trace"].as_array().unwrap().len(), 11);
}

#[test]
fn sweep_and_two_phase_exit_codes() {
    let inst = data("maxcut7.txt");
    let inst = inst.to_str().unwrap();
    let res = qaoa_depth(&[
        "sweep",
        "--instance",
        inst,
        "--lambda-grid",
        "2,1.2",
        "--tol",
        "0",
    ]);
    assert_eq!(code(&res), 2);
    let res = qaoa_depth(&[
        "sweep",
        "--instance",
        inst,
        "--lambda-grid",
        "2,0.432",
        "--tol",
        "0",
    ]);
    assert_eq!(code(&res), 0);
    assert!(String::from_utf8_lossy(&res.stdout).contains("lambda 0.432: selected"));

    let res = qaoa_depth(&[
        "two-phase",
        "--instance",
        inst,
        "--lambda",
        "0.432",
        "--phase2-total",
        "120",
        "--switch-at",
        "60",
    ]);
    assert_eq!(code(&res), 0);
}

#[test]
fn ensemble_and_depth_scan_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = data("maxcut7.txt");
    let ens = dir.path().join("ens.csv");
    let res = qaoa_depth(&[
        "ensemble",
        "--instance",
        inst.to_str().unwrap(),
        "--lambda",
        "0.432",
        "--replicas",
        "3",
        "--init-range",
        "0.27,0.33",
        "--seed",
        "5",
        "--max-iters",
        "20",
        "--tol",
        "0",
        "--out",
        ens.to_str().unwrap(),
    ]);
    assert_ne!(code(&res), 1, "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(std::fs::read_to_string(&ens).unwrap().lines().count(), 22);

    let scan = dir.path().join("scan.csv");
    let res = qaoa_depth(&[
        "depth-scan",
        "--instance",
        inst.to_str().unwrap(),
        "--algorithm",
        "pg",
        "--lambda-grid",
        "0.72,0.432",
        "--depths",
        "14,16",
        "--max-iters",
        "20",
        "--out",
        scan.to_str().unwrap(),
    ]);
    assert_ne!(code(&res), 1, "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(std::fs::read_to_string(&scan).unwrap().lines().count(), 5);
}
