//! End-to-end runs of the `ueq` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, body).unwrap();
        path
    }
}

fn ueq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ueq")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const TWO_BLOCKS: &str = r#"{"kind":"space","carrier":4,"generators":[[[0,1],[2,3]]]}"#;

#[test]
fn validate_reports_kinds_and_rejects_bad_files() {
    let ws = Workspace::new();
    let good = ws.file("space.json", TWO_BLOCKS);
    let bad = ws.file(
        "metric.json",
        r#"{"kind":"metric","carrier":2,"dist":[["0","1"],["2","0"]]}"#,
    );
    let out = ueq(&["validate", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("valid space"));
    let out = ueq(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("dist"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(ueq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ueq(&["check", "embedding"]).status.code(), Some(2));
    assert_eq!(ueq(&["verify", "--check", "P0.0"]).status.code(), Some(2));
}

#[test]
fn meet_and_generate() {
    let ws = Workspace::new();
    let a = ws.file(
        "a.json",
        r#"{"kind":"space","carrier":4,"generators":[[[0,1],[2,3]],[[0,1,2],[3]]]}"#,
    );
    let out = ueq(&["--json", "meet", a.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["blocks"], serde_json::json!([[0, 1], [2], [3]]));
    let out = ueq(&["generate", a.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 3);
}

#[test]
fn induce_restrict_and_product() {
    let ws = Workspace::new();
    let map = ws.file(
        "map.json",
        r#"{"kind":"map",
            "source":{"carrier":3,"generators":[[[0,1,2]]]},
            "target":{"carrier":2,"generators":[[[0],[1]]]},
            "values":[0,0,1]}"#,
    );
    let out = ueq(&["induce", map.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["generators"], serde_json::json!([[[0, 1], [2]]]));

    let sub = ws.file(
        "sub.json",
        r#"{"kind":"subset","space":{"carrier":4,"generators":[[[0,1],[2,3]]]},"elements":[0,2]}"#,
    );
    let out = ueq(&["--json", "restrict", sub.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["inclusion"], serde_json::json!([0, 2]));
    assert_eq!(v["space"]["generators"], serde_json::json!([[[0], [1]]]));

    let d2 = ws.file("d2.json", r#"{"kind":"space","carrier":2,"generators":[[[0],[1]]]}"#);
    let out = ueq(&["--json", "product", d2.to_str().unwrap(), d2.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["radices"], serde_json::json!([2, 2]));
    assert_eq!(v["space"]["carrier"], 4);
}

#[test]
fn topology_and_dot_output() {
    let ws = Workspace::new();
    let space = ws.file("space.json", TWO_BLOCKS);
    let dot = ws.dir.path().join("out.dot");
    let out = ueq(&["--json", "topology", space.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["opens"], serde_json::json!([[], [0, 1], [0, 1, 2, 3], [2, 3]]));
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("2 -> 3;") && !text.contains("0 -> 2;"));
    let out = ueq(&["dot", space.to_str().unwrap()]);
    assert_eq!(stdout(&out), text);
}

#[test]
fn check_predicates() {
    let ws = Workspace::new();
    let counter = ws.file(
        "id.json",
        r#"{"kind":"map",
            "source":{"carrier":2,"generators":[[[0],[1]],[[0,1]]]},
            "target":{"carrier":2,"generators":[[[0,1]]]},
            "values":[0,1]}"#,
    );
    let out = ueq(&["check", "embedding", "--map", counter.to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "false");
    let out = ueq(&["check", "continuous", "--map", counter.to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "true");

    let path = ws.file(
        "path.json",
        r#"{"kind":"metric","carrier":3,"dist":[["0","1","2"],["1","0","1"],["2","1","0"]]}"#,
    );
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&ueq(&["check", "transitive", "--metric", p])).trim(), "false");
    assert_eq!(
        stdout(&ueq(&["check", "r-transitive", "--metric", p, "--radius", "3/2"])).trim(),
        "false"
    );
    assert_eq!(
        stdout(&ueq(&["check", "r-transitive", "--metric", p, "--radius", "1/2"])).trim(),
        "true"
    );

    let sierpinski = ws.file(
        "sierpinski.json",
        r#"{"kind":"topology","carrier":2,"opens":[[],[0],[0,1]]}"#,
    );
    let out = ueq(&["--json", "check", "uniformisable", "--topology", sierpinski.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], false);

    let sub = ws.file(
        "open.json",
        r#"{"kind":"subset","space":{"carrier":4,"generators":[[[0,1,2,3]],[[0,1],[2,3]]]},"elements":[0,1]}"#,
    );
    assert_eq!(stdout(&ueq(&["check", "u-open", "--subset", sub.to_str().unwrap()])).trim(), "true");
    assert_eq!(stdout(&ueq(&["check", "dense", "--subset", sub.to_str().unwrap()])).trim(), "false");
}

#[test]
fn verify_selected_checks() {
    let out = ueq(&["--json", "verify", "--check", "P2.11", "--check", "P3.8", "--trials", "50", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert_eq!(checks[0]["check_id"], "P2.11");
    assert_eq!(checks[0]["failures"], 0);
    assert_eq!(v["seed"], 3);

    let out = ueq(&["--json", "verify", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["checks"].as_array().unwrap().is_empty());
}

#[test]
fn counterexamples_replay_through_the_cli() {
    // a trace document is an ordinary instance file
    let ws = Workspace::new();
    let check = ueq_harness::checks::find("P2.6").unwrap();
    let (_, trace) = check.trial(42, 0, &ueq_harness::Caps::default());
    let map = ws.file("map.json", &trace["map"].to_string());
    let out = ueq(&["check", "embedding", "--map", map.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(matches!(stdout(&out).trim(), "true" | "false"));
}
