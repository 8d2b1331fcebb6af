use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sumprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumprod")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const MOD8_01: &str = r#"{"ring":[2,1,1,3],"elements":["0","1"]}"#;

#[test]
fn suite_passes_and_reports_json_lines() {
    let out = sumprod(&["suite", "ring", "--trials", "10", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<serde_json::Value> = stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["type"], "header");
    assert_eq!(lines[0]["rng"], "chacha8-stream-v1");
    let summary = lines.last().unwrap();
    assert_eq!(summary["type"], "summary");
    assert_eq!(summary["pass"], true);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for path in [&a, &b] {
        let out = sumprod(&["suite", "digits", "--trials", "20", "--seed", "11", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn generate_then_read_back() {
    let dir = TempDir::new().unwrap();
    let set = dir.path().join("set.json");
    let set = set.to_str().unwrap();
    let out =
        sumprod(&["generate", "--ring", "2,1,1,6", "--eps", "1/2", "--valuations", "2,3", "--seed", "5", "--out", set]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(set).unwrap()).unwrap();
    assert_eq!(file["ring"], serde_json::json!([2, 1, 1, 6]));
    assert!(file["elements"].as_array().unwrap().len() >= 8);
    let out = sumprod(&["regularize", "--set", set]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn growth_on_small_set() {
    let dir = TempDir::new().unwrap();
    let set = write(dir.path(), "s.json", MOD8_01);
    let out = sumprod(&["growth", "--set", &set, "--C", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(sumprod(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(sumprod(&["growth"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"ring":[4,1,1,2],"elements":["0"]}"#);
    assert_eq!(sumprod(&["growth", "--set", &bad]).status.code(), Some(2));
    let junk = write(dir.path(), "junk.json", "not json");
    assert_eq!(sumprod(&["subfield", "--set", &junk]).status.code(), Some(2));
}

#[test]
fn cap_breach_exits_3() {
    let dir = TempDir::new().unwrap();
    let set = write(dir.path(), "s.json", r#"{"ring":[2,1,1,6],"elements":["0","1","3","7","12","30"]}"#);
    let out = sumprod(&["growth", "--set", &set, "--C", "6", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
