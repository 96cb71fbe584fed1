//! End-to-end tests of the `dephase` binary: flags, exit codes, file
//! schemas, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dephase"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dephase-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let headers: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (headers, rows)
}

#[test]
fn rate_table_contains_the_exact_root() {
    let dir = tmp_dir("rate");
    let out = dir.join("rate.csv");
    let res = run(&["rate", "--s", "3", "--t-max", "10", "--steps", "1000", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (headers, rows) = read_csv(&out);
    assert_eq!(headers, ["t", "gamma", "big_gamma", "tilde_gamma"]);
    assert_eq!(rows.len(), 1002); // 1001 grid rows + the inserted root
    let root = 3.0_f64.sqrt();
    let near_root: Vec<&Vec<String>> = rows
        .iter()
        .filter(|r| (r[0].parse::<f64>().unwrap() - root).abs() < 5e-3)
        .collect();
    assert!(near_root
        .iter()
        .any(|r| r[1].parse::<f64>().unwrap().abs() < 1e-6));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn rate_is_nonnegative_without_crossings() {
    let dir = tmp_dir("rate2");
    let out = dir.join("rate.csv");
    let res = run(&["rate", "--s", "2", "--t-max", "10", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let (_, rows) = read_csv(&out);
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() >= 0.0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_domain_exits_2() {
    let res = run(&["rate", "--s", "0.5"]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("domain"), "stderr: {err}");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tmp_dir("det");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for (path, _) in [(&a, 0), (&b, 1)] {
        let res = run(&[
            "trajectory", "--s", "4", "--phi-in", "0.6283185307179586",
            "--pulse-time", "1", "--t-max", "30", "--steps", "500",
            "--out", path.to_str().unwrap(),
        ]);
        assert!(res.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_format_mirrors_csv_schema() {
    let dir = tmp_dir("json");
    let out = dir.join("rate.json");
    let res = run(&["rate", "--s", "3", "--steps", "10", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 12); // 11 grid rows + root row
    let keys: Vec<&String> = arr[0].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["t", "gamma", "big_gamma", "tilde_gamma"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn trajectory_both_modes_disagree_on_physicality() {
    // initial polar angle 0.2 pi, rotate-to-equator pulse at t~ = 1:
    // the fixed-dissipator trajectory leaves the ball, the exact one never does
    let dir = tmp_dir("both");
    let out = dir.join("traj.csv");
    let res = run(&[
        "trajectory", "--s", "4", "--mode", "both",
        "--phi-in", "0.6283185307179586", "--pulse-time", "1",
        "--t-max", "30", "--steps", "600", "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (headers, fixed) = read_csv(&dir.join("traj_fixed.csv"));
    assert_eq!(
        headers,
        ["t", "rx", "ry", "rz", "purity", "coherence", "inside_ball"]
    );
    let (_, micro) = read_csv(&dir.join("traj_microscopic.csv"));
    assert!(fixed.iter().any(|r| r[6] == "false"));
    assert!(micro.iter().all(|r| r[6] == "true"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn zero_angle_pulse_makes_modes_identical() {
    let dir = tmp_dir("zero");
    let out = dir.join("traj.csv");
    let res = run(&[
        "trajectory", "--s", "4", "--mode", "both", "--phi-in", "0.9",
        "--pulse-time", "1", "--pulse-angle", "0",
        "--t-max", "10", "--steps", "200", "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let (_, fixed) = read_csv(&dir.join("traj_fixed.csv"));
    let (_, micro) = read_csv(&dir.join("traj_microscopic.csv"));
    assert_eq!(fixed.len(), micro.len());
    for (a, b) in fixed.iter().zip(&micro) {
        for col in 0..6 {
            let x: f64 = a[col].parse().unwrap();
            let y: f64 = b[col].parse().unwrap();
            assert!((x - y).abs() <= 1e-12, "col {col}: {x} vs {y}");
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn trajectory_svg_written() {
    let dir = tmp_dir("svg");
    let out = dir.join("traj.csv");
    let svg = dir.join("traj.svg");
    let res = run(&[
        "trajectory", "--s", "4", "--phi-in", "0.6283185307179586",
        "--pulse-time", "1", "--t-max", "30", "--steps", "300",
        "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let content = std::fs::read_to_string(&svg).unwrap();
    assert!(content.starts_with("<svg"));
    assert!(content.contains("circle"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cp_audit_prints_verdict() {
    let dir = tmp_dir("audit");
    let out = dir.join("audit.csv");
    let res = run(&[
        "cp-audit", "--s", "4", "--pulse-time", "1",
        "--t-max", "30", "--steps", "100", "--samples", "64",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("verdict: CP-violating"), "stdout: {stdout}");
    let (headers, rows) = read_csv(&out);
    assert_eq!(headers, ["t", "min_choi_eig", "max_bloch_norm"]);
    assert_eq!(rows.len(), 101);

    // the uncontrolled audit is clean
    let res = run(&["cp-audit", "--s", "4", "--t-max", "30", "--steps", "50", "--samples", "64",
        "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stdout).contains("verdict: CP"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_trims_and_reports() {
    let dir = tmp_dir("sweep");
    let out = dir.join("sweep.csv");
    let res = bin()
        .args([
            "sweep", "--s-min", "1.5", "--s-max", "4.0", "--s-steps", "5",
            "--default-T", "20", "--out", out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(res.status.success());
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("warning"), "stderr: {err}");
    let (headers, rows) = read_csv(&out);
    assert_eq!(
        headers,
        [
            "s", "T", "t_tilde", "phi_in", "pulse_angle",
            "cbar_uncontrolled", "cbar_controlled", "cbar_controlled_microscopic", "feasible",
        ]
    );
    // 1.5 and 2.0 trimmed, 2.5 / 3.0 / 3.5 / 4.0 remain
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[8] == "true"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_with_no_valid_points_exits_3() {
    let res = run(&["sweep", "--s-min", "1.2", "--s-max", "1.8", "--s-steps", "3"]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn config_error_exits_2() {
    let res = run(&[
        "trajectory", "--s", "3", "--pulse-time", "1", "--pulse-axis", "z",
    ]);
    // z pulse with no explicit angle cannot take the state to the equator
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn oracle_validate_small_bath_reports_without_failing() {
    let dir = tmp_dir("oracle");
    let out = dir.join("oracle.csv");
    let res = run(&[
        "oracle-validate", "--s", "3", "--n-modes", "10", "--omega-max", "20",
        "--t-max", "6", "--steps", "12", "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("max_gamma_err"), "stdout: {stdout}");
    let (headers, rows) = read_csv(&out);
    assert_eq!(
        headers,
        ["t", "gamma_closed", "gamma_oracle", "abs_err",
         "phase_closed", "phase_oracle", "phase_err"]
    );
    assert_eq!(rows.len(), 13);
    // phase columns are empty before the pulse
    assert_eq!(rows[0][4], "");
    assert!(rows.last().unwrap()[4] != "");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn oracle_validate_full_bath_is_accurate() {
    let dir = tmp_dir("oracle-full");
    let out = dir.join("oracle.csv");
    let res = run(&[
        "oracle-validate", "--s", "3", "--t-max", "8", "--steps", "16",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    // summary line carries the three maxima
    assert!(stdout.contains("max_bloch_err"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn t_scan_reports_horizon_trend() {
    let dir = tmp_dir("tscan");
    let out = dir.join("tscan.csv");
    let res = run(&[
        "t-scan", "--s", "3", "--t-min", "5", "--t-max", "45", "--t-steps", "4",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let (_, rows) = read_csv(&out);
    assert_eq!(rows.len(), 5);
    // longer horizons keep the enhancement alive
    assert!(rows.iter().all(|r| r[8] == "true"));
    let cbars: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(cbars.windows(2).all(|w| w[1] > w[0] - 1e-9), "{cbars:?}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn default_output_honors_env_dir() {
    let dir = tmp_dir("envdir");
    let res = bin()
        .args(["rate", "--s", "3", "--steps", "5"])
        .env("DEPHASE_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(res.status.success());
    assert!(dir.join("rate.csv").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn flux_field_signs_follow_the_rate() {
    let dir = tmp_dir("flux");
    let out = dir.join("flux.csv");
    // gamma > 0 at t = 1 for s = 3: all flux <= 0
    let res = run(&["flux-field", "--s", "3", "--t", "1", "--resolution", "21",
        "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let (headers, rows) = read_csv(&out);
    assert_eq!(headers, ["rx", "rz", "flux"]);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() <= 0.0));
    // gamma < 0 at t = 3: all flux >= 0
    let res = run(&["flux-field", "--s", "3", "--t", "3", "--resolution", "21",
        "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let (_, rows) = read_csv(&out);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() >= 0.0));
    std::fs::remove_dir_all(&dir).unwrap();
}
