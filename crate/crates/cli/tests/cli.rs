use std::path::PathBuf;
use std::process::{Command, Output};

use nilterm_cli::{emit_problem, parse_problem, ReportDocument};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "problems", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn nilterm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilterm")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_sp20_headline() {
    let o = nilterm(&["analyze", &fixture("sp20.toml")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("terminalizations: 24"));
}

#[test]
fn analyze_so40_machine_document() {
    let path = fixture("so40.toml");
    let o = nilterm(&["analyze", &path, "--format", "machine"]);
    assert!(o.status.success());
    let doc: ReportDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.headline(), Some(8));
    assert_eq!(doc.counts["w_x_order"], 48);
    assert_eq!(doc.problem.orbit, vec![11, 11, 11, 3, 3, 1]);
    let walls: Vec<(usize, &str)> = doc.walls.iter().map(|w| (w.beta, w.merge_kind.as_str())).collect();
    assert_eq!(
        walls,
        vec![(3, "gl-gl"), (6, "gl-gl"), (9, "gl-gl"), (13, "gl-classical")]
    );
    // Byte-identical on a second run, also with worker threads.
    let again = nilterm(&["analyze", &path, "--format", "machine", "--threads", "3"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn wprime_so40_generators() {
    let o = nilterm(&["wprime", &fixture("so40.toml"), "--format", "machine"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["group"]["order"], 96);
    let names: Vec<&str> = v["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["name"].as_str().unwrap())
        .collect();
    for n in ["T3", "T6", "T9+13", "T13"] {
        assert!(names.contains(&n), "{names:?}");
    }
}

#[test]
fn twist_trace_reports_levi_moves() {
    let o = nilterm(&[
        "twist-trace",
        &fixture("so40.toml"),
        "--at",
        "9,13",
        "--format",
        "machine",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 3);
    assert!(steps[1]["k_action"].is_null());
    assert_eq!(steps[1]["marks"], serde_json::json!([3, 6, 10, 13]));
    assert!(!steps[2]["k_action"].is_null());
}

#[test]
fn enumerate_counts_chambers() {
    let o = nilterm(&["enumerate", &fixture("sp20.toml"), "--format", "machine"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["chambers"], 48);
    assert_eq!(v["edges"].as_array().unwrap().len(), 48 * 3);
}

#[test]
fn oracle_collapse_agrees() {
    let o = nilterm(&["oracle", "collapse", "--family", "D", "--n", "10"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0 disagreements"));
    let bad = nilterm(&["oracle", "collapse", "--family", "B", "--n", "10"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn budget_and_input_errors_exit_2() {
    let o = nilterm(&["analyze", &fixture("so40.toml"), "--max-nodes", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    let o = nilterm(&["analyze", "/nonexistent/problem.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fixtures_round_trip() {
    for name in ["sp20.toml", "so40.toml"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let spec = parse_problem(&text).unwrap();
        assert_eq!(parse_problem(&emit_problem(&spec)).unwrap(), spec);
    }
}
