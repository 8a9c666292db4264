use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stepslide"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

#[test]
fn run_writes_trace_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let svg = dir.path().join("t.svg");
    let out = bin()
        .arg("run")
        .arg("--scenario")
        .arg(scenario("nominal.toml"))
        .args(["--rotation", "off", "--slide", "on", "--seed", "3"])
        .arg("--trace")
        .arg(&trace)
        .arg("--svg")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("tick,time,x,y,heading"));
    assert!(csv.lines().count() > 100);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("outcome            goal"));
}

#[test]
fn timeout_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("empty.toml")).unwrap();
    let path = dir.path().join("short.toml");
    std::fs::write(&path, format!("duration_limit = 1.0\n{text}")).unwrap();
    let out = bin().arg("run").arg("--scenario").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_scenario_is_an_error() {
    let out = bin().args(["run", "--scenario", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn unwritable_trace_is_an_error() {
    let out = bin()
        .arg("run")
        .arg("--scenario")
        .arg(scenario("empty.toml"))
        .args(["--trace", "/nonexistent/dir/t.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn suite_writes_reports_and_is_repeatable() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let out = bin()
            .arg("suite")
            .arg("--scenario")
            .arg(scenario("perturbed.toml"))
            .args(["--seeds", "2", "--out"])
            .arg(d.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(d.path().join("summary.csv").exists());
        assert!(d.path().join("runs.csv").exists());
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path().join("traces"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 8);
    for n in names {
        let a = std::fs::read(dirs[0].path().join("traces").join(&n)).unwrap();
        let b = std::fs::read(dirs[1].path().join("traces").join(&n)).unwrap();
        assert_eq!(a, b, "{}", n.to_string_lossy());
    }
}

#[test]
fn oracle_passes() {
    let out = bin().arg("oracle").output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
}
