use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koch-billiards")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn build_reports_counts_and_area() {
    let v = json_of(&run(&["build", "--level", "2"]));
    assert_eq!(v["sides"], 48);
    assert_eq!(v["area_ratio"], "40/27");
    assert_eq!(v["perimeter"], "16/3");
}

#[test]
fn identical_runs_give_identical_bytes() {
    for args in [
        &["build", "--level", "3"][..],
        &["orbit", "--level", "1", "--seed", "hook"],
        &["sequence", "--levels", "0..3", "--seed", "seven-twelfths"],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["build", "--level", "99"]).status.code(), Some(4));
    assert_eq!(run(&["orbit", "--level", "0", "--t", "0", "--dir", "pi/3"]).status.code(), Some(2));
    assert_eq!(run(&["orbit", "--level", "0", "--t", "1/2", "--dir", "-1,-1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--levels", "0..1", "--values", "3", "--s-max", "1"]).status.code(), Some(3));
    let missing = run(&["build", "--level", "1", "--json", "/nonexistent-dir/out.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn seven_twelfths_sequence_stabilizes() {
    let v = json_of(&run(&["sequence", "--levels", "0..3", "--seed", "seven-twelfths"]));
    assert_eq!(v["constant"]["verdict"], "StabilizesAt(1)");
    assert_eq!(v["dichotomy"], "AllClosed");
}

#[test]
fn orbit_from_an_explicit_seed_matches_the_named_one() {
    let named = json_of(&run(&["orbit", "--level", "0", "--seed", "hook"]));
    let explicit = json_of(&run(&["orbit", "--level", "0", "--t", "3/4", "--dir", "pi/6", "--mirror"]));
    assert_eq!(named, explicit);
    assert_eq!(named["status"]["kind"], "Periodic");
    assert_eq!(named["degenerate"], true);
}

#[test]
fn surface_table() {
    let out = run(&["surface", "--levels", "0..2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "level\tchi\tgenus\tremovable\tnonremovable\tdegree");
    assert_eq!(lines[3], "2\t-90\t46\t18\t30\t1080");
}

#[test]
fn file_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("o.json");
    let svg = dir.path().join("o.svg");
    let csv = dir.path().join("o.csv");
    let out = run(&[
        "orbit",
        "--level",
        "1",
        "--seed",
        "hook",
        "--json",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["level"], 1);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("index,side,t,dir_a,dir_b,type\n"));
    assert_eq!(table.lines().count(), 1 + v["footprint"].as_array().unwrap().len());
}

#[test]
fn path_reports_a_limit_off_the_boundary() {
    let v = json_of(&run(&["path", "--levels", "0..4", "--seed", "midpoint", "--both"]));
    assert_eq!(v["limit_off_boundary"], true);
    assert!(v["path"]["vertices"].as_array().unwrap().len() >= 3);
    assert!(v["combined"].is_object());
}

#[test]
fn help_lists_named_angles() {
    let out = run(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in ["pi/6  -> 1,1", "pi/3  -> 0,1", "pi/2  -> -1,2", "5pi/6 -> -2,1"] {
        assert!(text.contains(line), "{line}");
    }
}
