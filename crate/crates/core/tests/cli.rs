use std::path::Path;
use std::process::{Command, Output};

fn rtprof(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtprof"))
        .args(args)
        .current_dir(dir)
        .env_remove("RTPROF_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(dir: &Path, out: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(format!("{out}.manifest.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn rt_build_writes_graph_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtprof(
        dir.path(),
        &[
            "rt-build", "--H", "2", "--V", "2", "--depth", "3", "--out", "rt.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let g: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rt.json")).unwrap())
            .unwrap();
    assert_eq!(g["n"], 85);
    let m = manifest(dir.path(), "rt.json");
    assert_eq!(m["status"], "ok");
    assert_eq!(m["command"], "rt-build");
    assert_eq!(m["outputs"][0], "rt.json");

    let v = rtprof(
        dir.path(),
        &["rt-validate", "--in", "rt.json", "--H", "2", "--V", "2"],
    );
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout(&v).matches("PASS").count(), 5);
}

#[test]
fn rt_validate_rejects_foreign_graph() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("k3.json"),
        "{\"n\":3,\"edges\":[[0,1],[0,2],[1,2]]}",
    )
    .unwrap();
    let v = rtprof(dir.path(), &["rt-validate", "--in", "k3.json"]);
    assert_eq!(v.status.code(), Some(2));
}

#[test]
fn h2_of_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p2.json"), "{\"n\":2,\"edges\":[[0,1]]}").unwrap();
    let o = rtprof(dir.path(), &["h2", "--in", "p2.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1.41421356"), "{}", stdout(&o));
}

#[test]
fn sweep_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = rtprof(
        dir.path(),
        &[
            "sweep", "--H", "2", "--V", "2", "--p", "1", "--k", "1..3", "--out", "s.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("graph_id,r,p,lower_bound,upper_estimate,slope_running\n"));
    let f = rtprof(dir.path(), &["fit", "--in", "s.csv"]);
    assert_eq!(f.status.code(), Some(0));
    assert!(stdout(&f).contains("slope = "));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        rtprof(dir.path(), &["h2", "--in", "missing.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        rtprof(dir.path(), &["rt-build", "--H", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        rtprof(
            dir.path(),
            &["rt-build", "--H", "1", "--V", "2", "--depth", "2", "--out", "x.json"]
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn budget_error_still_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rtprof"))
        .args([
            "rt-build", "--H", "2", "--V", "2", "--depth", "3", "--out", "b.json",
        ])
        .current_dir(dir.path())
        .env("RTPROF_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(!dir.path().join("b.json").exists());
    let m = manifest(dir.path(), "b.json");
    assert_eq!(m["status"], "budget_exceeded");
    assert_eq!(m["budget"]["vertices"], 10);
    assert!(m["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = rtprof(
            dir.path(),
            &[
                "sweep",
                "--H",
                "2",
                "--V",
                "2",
                "--p",
                "1.5",
                "--k",
                "1..3",
                "--out",
                &format!("{out}.csv"),
            ],
        );
        assert_eq!(o.status.code(), Some(0));
        let o = rtprof(
            dir.path(),
            &[
                "yk-build",
                "--H",
                "2",
                "--V",
                "2",
                "--p",
                "1",
                "--k",
                "2",
                "--out",
                &format!("{out}.json"),
            ],
        );
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.json"), read("b.json"));
}
