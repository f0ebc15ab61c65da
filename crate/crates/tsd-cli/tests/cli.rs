//! End-to-end tests of the `tsd` binary: exit statuses, file outputs, and
//! byte-level reproducibility of the data files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tsd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tsd"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tsd-cli-test-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn assert_status(output: &Output, expected: i32) {
    let code = output.status.code().unwrap_or(-1);
    assert_eq!(
        code,
        expected,
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn ideal_preset_reports_negligible_errors() {
    let dir = temp_dir("ideal");
    let out = tsd()
        .args(["cnot", "--preset", "ideal", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_status(&out, 0);
    let summary = read(&dir.join("cnot_summary.csv"));
    assert!(summary.contains("# preset: ideal"));
    let tt: f64 = summary
        .lines()
        .find(|l| l.starts_with("truth_table_error,"))
        .and_then(|l| l.split(',').nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!(tt.abs() <= 1e-9, "truth-table error {tt}");
    assert!(dir.join("u_realized.csv").exists());
}

#[test]
fn malformed_config_key_names_the_key_and_exits_2() {
    let dir = temp_dir("badkey");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "[protocol]\nomega_c_mhz = 3.6\nbogus_key = 1\n").unwrap();
    let out = tsd()
        .args(["cnot", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_status(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bogus_key"), "stderr: {stderr}");
}

#[test]
fn unparseable_value_exits_2() {
    let out = tsd()
        .args(["cnot", "--preset", "ideal", "omega_c_mhz=three"])
        .output()
        .unwrap();
    assert_status(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("omega_c_mhz"));
}

#[test]
fn unknown_preset_exits_2() {
    let out = tsd().args(["cnot", "--preset", "table9-case7-3uK"]).output().unwrap();
    assert_status(&out, 2);
}

#[test]
fn empty_sweep_axis_exits_2() {
    let dir = temp_dir("empty-axis");
    let out = tsd()
        .args([
            "sweep",
            "--axis",
            "tau",
            "--preset",
            "decay",
            "--out",
            dir.to_str().unwrap(),
            "taus_us=",
        ])
        .output()
        .unwrap();
    assert_status(&out, 2);
}

#[test]
fn sweep_csvs_are_byte_identical_across_runs() {
    let run = |tag: &str| {
        let dir = temp_dir(tag);
        let out = tsd()
            .args([
                "sweep",
                "--axis",
                "temperature",
                "--preset",
                "table2-case1-5uK",
                "--out",
                dir.to_str().unwrap(),
                "temperatures_uk=5,50",
                "grid_points=21",
            ])
            .output()
            .unwrap();
        assert_status(&out, 0);
        read(&dir.join("sweep_temperature.csv"))
    };
    let strip_wall_time = |csv: String| -> String {
        csv.lines()
            .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_else(|| l.to_string()))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = strip_wall_time(run("repro-a"));
    let b = strip_wall_time(run("repro-b"));
    assert_eq!(a, b, "data columns differ between identical runs");
}

#[test]
fn stark_solves_cesium_and_rubidium() {
    let dir = temp_dir("stark");
    let out = tsd()
        .args(["stark", "--preset", "cesium", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_status(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("1.3132"), "stdout: {stdout}");
    let csv = read(&dir.join("stark.csv"));
    assert!(csv.contains("c_factor_sq,8"));

    let out = tsd()
        .args(["stark", "--preset", "rubidium", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_status(&out, 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("0.9764"));
}

#[test]
fn unbalanceable_branching_factor_exits_3() {
    let out = tsd()
        .args(["stark", "--preset", "cesium", "c_factor_sq=0.5"])
        .output()
        .unwrap();
    assert_status(&out, 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no solution"));
}

#[test]
fn traces_are_written_per_input() {
    let dir = temp_dir("traces");
    let out = tsd()
        .args([
            "cnot",
            "--preset",
            "ideal",
            "--traces",
            "--out",
            dir.to_str().unwrap(),
            "samples_per_pulse=16",
        ])
        .output()
        .unwrap();
    assert_status(&out, 0);
    for label in ["00", "01", "10", "11"] {
        let trace = read(&dir.join(format!("trace_{label}.csv")));
        assert!(trace.contains("t_s,"), "missing time column in trace_{label}");
        assert!(trace.lines().count() > 16);
    }
}

#[test]
fn demo_two_state_prints_the_revival() {
    let out = tsd().args(["demo-two-state", "--cycles", "2"]).output().unwrap();
    assert_status(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("revival overlap"));
    assert!(stdout.contains("1.000000000000"));
}

#[test]
fn bell_preset_reports_ensemble_error() {
    let dir = temp_dir("bell");
    let out = tsd()
        .args([
            "bell",
            "--preset",
            "table3-case2-5uK",
            "--out",
            dir.to_str().unwrap(),
            "grid_points=41",
        ])
        .output()
        .unwrap();
    assert_status(&out, 0);
    let csv = read(&dir.join("bell.csv"));
    let avg: f64 = csv
        .lines()
        .find(|l| l.starts_with("bell_error_avg,"))
        .and_then(|l| l.split(',').nth(1))
        .unwrap()
        .parse()
        .unwrap();
    // the 41-point grid already reproduces the reference value closely
    assert!((avg / 2.57e-4 - 1.0).abs() < 0.10, "averaged bell error {avg}");
}
