use std::path::Path;
use std::process::{Command, Output};

fn loday(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loday"))
        .args(args)
        .arg("--cache-dir")
        .arg(cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn lists_bundled_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let o = loday(&["scenarios"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for name in ["klein_f3", "smalltrunc", "diagonal_witnesses"] {
        assert!(out.contains(name), "{out}");
    }
}

#[test]
fn homology_with_golden_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = loday(
        &["homology", "--field", "Q", "--degree", "4", "--space", "sphere:1", "--algebra", "trunc:2", "--golden", "HHn_Q_trunc(n=1,m=2)"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("[1, 1, 1, 1, 1]"), "{}", stdout(&o));
}

#[test]
fn failed_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = loday(&["stability", "--field", "Q", "--algebra", "trunc:2", "--n", "2", "--expect-stable", "true"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = loday(&["run", "no_such_scenario"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = loday(&["homology", "--space", "sphere:x", "--algebra", "poly"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = loday(&["homology", "--field", "F4", "--space", "sphere:1", "--algebra", "trunc:2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors_carry_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    std::fs::write(&file, "name = \"bad\"\ntask = \"homology\"\nfield = \"Q\"\ndegree_budget = -1\n").unwrap();
    let o = loday(&["validate", file.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.toml:4:"), "{err}");
}

#[test]
fn validates_scenarios_and_simplicial_sets() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s2.json");
    let s2 = loday_core::simplicial::sphere(2, 3).unwrap();
    std::fs::write(&json, serde_json::to_string(&s2).unwrap()).unwrap();
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/klein_f3.toml");
    let o = loday(&["validate", json.to_str().unwrap(), scenario.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("ok ")).count(), 2);
}

#[test]
fn diagonal_witness_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = loday(
        &["diagonal", "--out", out.to_str().unwrap(), "witness", "--n", "2", "--k", "2", "--multiple", "2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("diagonal.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["details"]["items"][0]["witness"].is_array());
}
