use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn telescope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telescope"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn extended_degrees(table: &str) -> Vec<usize> {
    table
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(3).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn build_prints_component_table() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_config(
        dir.path(),
        "g.json",
        r#"{"group": "grigorchuk", "levels": [1, 2, 3]}"#,
    );
    let o = telescope(&["build", "--config", &g]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(extended_degrees(&stdout(&o)), vec![3, 5, 9]);

    let gs = write_config(
        dir.path(),
        "gs.json",
        r#"{"group": "gupta-sidki-3", "levels": [1, 2]}"#,
    );
    let o = telescope(&["build", "--config", &gs]);
    assert_eq!(extended_degrees(&stdout(&o)), vec![4, 10]);
}

#[test]
fn config_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(
        dir.path(),
        "bad.json",
        "{\n  \"group\": \"grigorchuk\",\n  \"levels\": []\n}\n",
    );
    let o = telescope(&["build", "--config", &bad]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let typo = write_config(
        dir.path(),
        "typo.json",
        "{\n  \"group\": \"grigorchuk\",\n  \"levels\": [1],\n  \"sede\": 1\n}\n",
    );
    let o = telescope(&["verify", "--config", &typo]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn word_command_examples() {
    let o = telescope(&["word", "--config", "builtin:demo", "--word", "t"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("order in truncation: 2"), "{text}");
    assert!(text.contains("orbit sizes [2, 1]"), "{text}");

    let o = telescope(&["word", "--config", "builtin:demo", "--word", "t g1"]);
    assert!(stdout(&o).contains("order in truncation: 3"));

    let o = telescope(&["word", "--config", "builtin:demo", "--word", "g1 g1"]);
    assert!(stdout(&o).contains("identity in every component"));

    let o = telescope(&["word", "--config", "builtin:demo", "--word", "g1 q7"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("\"q7\""), "{}", stderr(&o));
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let oa = telescope(&[
        "verify",
        "--config",
        "builtin:demo",
        "--out",
        a.to_str().unwrap(),
    ]);
    let ob = telescope(&[
        "verify",
        "--config",
        "builtin:demo",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(oa.stdout.len(), ob.stdout.len());
    assert_eq!(oa.status.code(), ob.status.code());
}

fn failing_checks(cert: &Value) -> Vec<&Value> {
    cert["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail" && c["parameters"]["informational"] != true)
        .collect()
}

#[test]
fn grigorchuk_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"group": "grigorchuk", "levels": [1, 2, 3], "ball_radius": 2,
            "word_sample": {"count": 200, "max_length": 4}, "seed": 7}"#,
    );
    let o = telescope(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cert["format_version"], 1);
    assert_eq!(cert["alt_cutoff"], 1);
    let subdirect = cert["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "subdirect")
        .unwrap();
    let orders: Vec<&str> = subdirect["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["order"].as_str().unwrap())
        .collect();
    assert_eq!(orders, ["6", "120", "362880"]);
    // the only failures are the strict-bound pigeonhole sub-checks
    let fails = failing_checks(&cert);
    assert!(!fails.is_empty());
    assert_eq!(o.status.code(), Some(1));
    for f in fails {
        assert_eq!(f["name"], "trace_lemmas");
        let v = &f["parameters"]["violations"];
        assert_eq!(v["avoidance"], 0);
        assert_eq!(v["return_to_p"], 0);
        assert_eq!(v["pigeonhole_relaxed_bound"], 0);
    }
}

#[test]
fn broken_recursion_fails_transitivity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    // b, c, d lose their sections, so nothing moves the second tree letter
    let cfg = write_config(
        dir.path(),
        "broken.json",
        r#"{
  "group": {"arity": 2, "generators": [
    {"name": "a", "root": "(0 1)", "sections": ["1", "1"]},
    {"name": "b", "root": "()", "sections": ["1", "1"]},
    {"name": "c", "root": "()", "sections": ["1", "1"]},
    {"name": "d", "root": "()", "sections": ["1", "1"]}
  ]},
  "levels": [1, 2, 3],
  "ball_radius": 1
}"#,
    );
    let o = telescope(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  transitivity"), "{}", stdout(&o));
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let trans = &cert["checks"][0];
    assert_eq!(trans["name"], "transitivity");
    assert_eq!(trans["witnesses"][1]["transitive"], false);
}
