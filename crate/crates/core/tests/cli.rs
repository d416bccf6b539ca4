use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_currents-lab"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn empty_task_list_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "empty.json", r#"{"schema": 1, "name": "empty", "dimension": 2, "tasks": []}"#);
    let out = dir.path().join("out");
    let o = run(&["run", f.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["tasks"].as_array().unwrap().len(), 0);
}

#[test]
fn misspelled_bump_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "typo.json",
        r#"{"schema": 1, "name": "typo", "dimension": 2,
            "derham": [{"name": "d", "charts": [{"bump": {"name": "smooth-radail"}}]}],
            "tasks": []}"#,
    );
    let o = run(&["run", f.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = text(&o.stderr);
    assert!(err.contains("bump.name") && err.contains("smooth-radail"), "{err}");
}

#[test]
fn malformed_json_reports_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\"schema\": 1,\n \"name\": }");
    let o = run(&["run", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("line 2"), "{}", text(&o.stderr));
}

#[test]
fn unknown_field_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "extra.json", r#"{"schema": 1, "name": "x", "dimension": 2, "taks": []}"#);
    let o = run(&["run", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("taks"), "{}", text(&o.stderr));
}

#[test]
fn missing_file_is_an_input_error() {
    let o = run(&["run", "/nonexistent/scenario.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_rejected() {
    let o = run(&["run", "x.json", "--fast"]);
    assert!(!o.status.success());
    assert_ne!(o.status.code(), Some(1));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = bin()
        .env("CURRENTS_LAB_THREADS", "zero")
        .args(["run", scenario("kronecker.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("CURRENTS_LAB_THREADS"));
}

#[test]
fn failing_task_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run",
        scenario("tangency.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--tol",
        "1e-30",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o.stdout));
    assert!(text(&o.stdout).contains("FAIL k3-point-mass"));
}

#[test]
fn list_builtin_names_everything() {
    let o = run(&["list-builtin"]);
    assert!(o.status.success());
    let s = text(&o.stdout);
    for name in ["smooth-radial", "poly4", "skewed-radial", "affine", "intersect", "homotopy", "lebesgue"] {
        assert!(s.contains(name), "{name} missing from\n{s}");
    }
    let o = run(&["list-builtin", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["bumps"].as_array().unwrap().len() >= 3);
}

#[test]
fn serial_and_parallel_runs_write_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let f = scenario("kronecker.json");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert!(run(&["run", f.to_str().unwrap(), "--out", a.to_str().unwrap(), "--serial"]).status.success());
    assert!(run(&["run", f.to_str().unwrap(), "--out", b.to_str().unwrap(), "--serial"]).status.success());
    let o = bin()
        .env("CURRENTS_LAB_THREADS", "2")
        .args(["run", f.to_str().unwrap(), "--out", c.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    let mut csvs: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_string_lossy().ends_with(".csv"))
        .collect();
    csvs.sort();
    assert_eq!(csvs.len(), 2);
    assert!(csvs[0].to_string_lossy().starts_with("00_"));
    for n in &csvs {
        let x = fs::read(a.join(n)).unwrap();
        assert_eq!(x, fs::read(b.join(n)).unwrap());
        assert_eq!(x, fs::read(c.join(n)).unwrap());
    }
    let header = fs::read_to_string(a.join(&csvs[0])).unwrap();
    assert!(header.starts_with("eps,raw_value,extrapolant,error_estimate\n"));
}
