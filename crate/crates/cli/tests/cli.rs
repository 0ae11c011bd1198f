use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn system(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../systems")
        .join(format!("{name}.json"))
}

fn torint(args: &[&str], dir: &TempDir) -> (Output, Option<Value>) {
    let out = dir.path().join("report.json");
    let output = Command::new(env!("CARGO_BIN_EXE_torint"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .output()
        .expect("spawn torint");
    let report = fs::read_to_string(&out)
        .ok()
        .map(|s| serde_json::from_str(&s).expect("report is JSON"));
    (output, report)
}

fn run(args: &[&str]) -> (i32, Option<Value>, String) {
    let dir = TempDir::new().unwrap();
    let (out, report) = torint(args, &dir);
    (
        out.status.code().expect("exit code"),
        report,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn path(name: &str) -> String {
    system(name).to_string_lossy().into_owned()
}

#[test]
fn check_ej_passes_on_all_examples() {
    for name in ["example1", "example2", "example3"] {
        let (code, report, _) = run(&["check-ej", &path(name)]);
        assert_eq!(code, 0, "{name}");
        let r = report.unwrap();
        assert_eq!(r["result"]["pass"], Value::Bool(true));
        assert_eq!(r["result"]["exit_code"], 0);
    }
}

#[test]
fn check_b_fails_without_claims() {
    let (code, report, _) = run(&["check-b", &path("example3")]);
    assert_eq!(code, 2);
    assert_eq!(report.unwrap()["result"]["pass"], Value::Bool(false));
}

#[test]
fn check_b_passes_with_declared_symmetries() {
    let (code, _, _) = run(&["check-b", &path("example1")]);
    assert_eq!(code, 0);
}

#[test]
fn reports_have_every_section() {
    let (_, report, _) = run(&["check-b", &path("example1")]);
    let r = report.unwrap();
    for key in [
        "tool",
        "version",
        "command",
        "system",
        "options",
        "hypotheses",
        "residuals",
        "kernel_reports",
        "rotation",
        "sections",
        "classification",
        "result",
    ] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["check-b", &path("example2")];
    torint(&args, &a);
    torint(&args, &b);
    let ra = fs::read(a.path().join("report.json")).unwrap();
    let rb = fs::read(b.path().join("report.json")).unwrap();
    assert!(!ra.is_empty());
    assert_eq!(ra, rb);
}

#[test]
fn parse_errors_point_at_the_offending_character() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(
        &file,
        r#"{"m": 0, "X": {"dx": "sin(y) + ", "dy": "1"}, "volume_density": "1"}"#,
    )
    .unwrap();
    let (code, report, stderr) = run(&["check-ej", file.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(report.is_none());
    assert!(stderr.contains("sin(y) + "), "{stderr}");
    assert!(stderr.contains('^'), "{stderr}");
}

#[test]
fn unknown_system_fields_are_rejected() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("extra.json");
    fs::write(&file, r#"{"m": 0, "X": {"dx": "1", "dy": "1"}, "colour": "red"}"#).unwrap();
    let (code, _, stderr) = run(&["check-ej", file.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("colour"), "{stderr}");
}

#[test]
fn usage_errors_exit_one() {
    let (code, report, _) = run(&["check-ej"]);
    assert_eq!(code, 1);
    assert!(report.is_none());
    let (code, _, _) = run(&["no-such-command", &path("example1")]);
    assert_eq!(code, 1);
}

#[test]
fn find_symmetry_on_example3_finds_the_exact_symmetry() {
    let (code, report, _) = run(&["find-symmetry", &path("example3")]);
    assert_eq!(code, 0);
    let r = report.unwrap();
    assert_eq!(r["kernel_reports"][0]["kernel"]["dimension"], 2);
}

#[test]
fn find_integral_on_example2_succeeds() {
    let (code, _, _) = run(&["find-integral", &path("example2")]);
    assert_eq!(code, 0);
}

#[test]
fn poincare_sections_separate_examples_1_and_3() {
    let (code, report, _) = run(&["poincare", &path("example1"), "--axis", "y", "--level", "0"]);
    assert_eq!(code, 0);
    assert!(report.unwrap()["sections"].is_array());
    let (code, _, _) = run(&["poincare", &path("example3"), "--axis", "y", "--level", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn constructions_pass_on_their_instances() {
    for (sub, name) in [
        ("volume", "example1"),
        ("symmetry-from-form", "one_form"),
        ("lie-point-i", "lie_point_i"),
        ("lie-point-ii", "lie_point_ii"),
        ("integral-from-pair", "pair_s1"),
        ("integral-from-pair", "pair_t2"),
    ] {
        let (code, _, stderr) = run(&["construct", sub, &path(name)]);
        assert_eq!(code, 0, "{sub} {name}: {stderr}");
    }
}

#[test]
fn rotation_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("csv");
    fs::create_dir(&csv).unwrap();
    let (out, report) = torint(
        &["rotation", &path("example1"), "--csv", csv.to_str().unwrap()],
        &dir,
    );
    assert_eq!(out.status.code(), Some(0));
    let ratio = report.unwrap()["rotation"]["estimates"][0]["ratio"].as_f64().unwrap();
    assert!((ratio - std::f64::consts::SQRT_2).abs() <= 1e-6);
    let text = fs::read_to_string(csv.join("trajectory.csv")).unwrap();
    assert!(text.lines().count() > 10);
}
