use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mteq::bench::{BenchReport, RAW_HEADER, SUMMARY_HEADER};

fn mteq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mteq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn first_line(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn generate_then_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("p1");
    let base = base.to_str().unwrap();
    let o = mteq(&["generate", "--problem", "1", "--order", "3", "--dim", "6", "--seed", "4", "--out", base]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for ext in ["mtns", "vec", "hdr"] {
        assert!(dir.path().join(format!("p1.{ext}")).exists());
    }
    let json = dir.path().join("solve.json");
    let o = mteq(&["solve", "--input", base, "--solver", "both", "--out", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("inexact: Converged"), "{out}");
    assert!(out.contains("regularized: Converged"), "{out}");
    assert!(out.contains("certified: true"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = mteq(&[
        "bench", "--problem", "2", "--order", "3", "--dim", "5", "--trials", "3", "--seed", "1",
        "--solver", "both", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(first_line(&out.join("raw.csv")), RAW_HEADER.join(","));
    assert_eq!(first_line(&out.join("summary.csv")), SUMMARY_HEADER.join(","));
    let raw = fs::read_to_string(out.join("raw.csv")).unwrap();
    assert_eq!(raw.lines().count(), 1 + 3 * 2);
    let report = BenchReport::read(&out.join("report.json")).unwrap();
    assert_eq!(report.trials.len(), 6);
    let again = BenchReport::from_json(&report.to_json().unwrap()).unwrap();
    assert_eq!(again.to_json().unwrap(), report.to_json().unwrap());
}

#[test]
fn bench_without_out_prints_summary() {
    let o = mteq(&[
        "bench", "--problem", "1", "--order", "3", "--dim", "4", "--trials", "2", "--solver", "regularized",
        "--b-mode", "zeros",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), SUMMARY_HEADER.join(","));
    assert!(out.lines().nth(1).unwrap().starts_with("1,3,4,regularized,2,2,"));
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["bench", "--problem", "9", "--order", "3", "--dim", "4"][..],
        &["bench", "--problem", "3", "--order", "3", "--dim", "10"],
        &["bench", "--problem", "1", "--order", "3", "--dim", "4", "--trials", "0"],
        &["bench", "--problem", "1", "--order", "3", "--dim", "4", "--tol", "-1"],
        &["bench", "--problem", "1", "--order", "3", "--dim", "4", "--solver", "qca"],
        &["generate", "--problem", "1", "--order", "3", "--dim", "4", "--b-mode", "sparse", "--out", "x"],
        &["verify", "--problem", "1", "--order", "1", "--dim", "4"],
    ] {
        let o = mteq(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn inexact_on_zero_rhs_reports_invalid_b() {
    // InvalidB is a solver outcome, so the trials still complete.
    let o = mteq(&[
        "bench", "--problem", "1", "--order", "3", "--dim", "4", "--trials", "2", "--solver", "inexact",
        "--b-mode", "zeros",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("inexact,2,0,"));
}

#[test]
fn verify_passes_on_problem1() {
    let o = mteq(&["verify", "--problem", "1", "--order", "3", "--dim", "6", "--trials", "3", "--points", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn missing_input_is_a_runtime_error() {
    let o = mteq(&["solve", "--input", "/nonexistent/instance"]);
    assert_eq!(o.status.code(), Some(1));
}
