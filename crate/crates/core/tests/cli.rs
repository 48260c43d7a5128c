use std::process::{Command, Output};

use serde_json::Value;

fn welch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_welch")).args(args).output().expect("spawn welch")
}

fn json(args: &[&str]) -> Value {
    let out = welch(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn solve_reports_m_solutions() {
    let v = json(&["solve", "--p", "7", "--g", "3", "--c", "1"]);
    assert_eq!(v["observed_count"], 6);
    assert_eq!(v["predicted_count"], 6);
    assert_eq!(v["instance"]["m"], 6);
    assert_eq!(v["query"]["kind"], "fixed-c");
    assert_eq!(v["solutions"].as_array().unwrap().len(), 6);
}

#[test]
fn solve_over_explicit_range() {
    let v = json(&["solve", "--p", "7", "--g", "2", "--c", "1", "--x-range", "1..42"]);
    assert_eq!(v["observed_count"], 6);
}

#[test]
fn p2_solve_uses_single_solution_rule() {
    let v = json(&["solve", "--p", "2", "--e", "3", "--g", "3", "--c", "1"]);
    assert_eq!(v["observed_count"], 1);
    assert_eq!(v["solutions"], serde_json::json!([3]));
}

#[test]
fn pairs_and_value_set() {
    let v = json(&["pairs", "--p", "5", "--e", "2", "--g", "2"]);
    let pairs = v["solutions"].as_array().unwrap();
    assert_eq!(pairs.len() as u64, v["predicted_count"].as_u64().unwrap());
    assert!(pairs.iter().all(|s| s["x"].is_i64() && s["c"].is_i64()));
    let out = welch(&["value-set", "--p", "7", "--g", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn table_csv_matches_direct_evaluation() {
    let out = welch(&["table", "--p", "7", "--g", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,c=1,c=2,c=3"));
    for (x, line) in (1u64..).zip(lines) {
        let cells: Vec<u64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(cells[0], x);
        for c in 1..=3u64 {
            let f = (2u64.pow((x - 1 + c) as u32) + 7 - x % 7) % 7;
            assert_eq!(cells[c as usize], f, "x = {x}, c = {c}");
        }
    }
}

#[test]
fn count_c_teichmuller_and_lift() {
    let v = json(&["count-c", "--p", "7", "--e", "2", "--g", "3", "--x", "10"]);
    assert_eq!(v["observed_count"], 1);
    assert_eq!(v["solutions"], serde_json::json!([4]));
    let out = welch(&["teichmuller", "--p", "7", "--e", "2", "--g", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let out = welch(&["lift", "--p", "7", "--e", "3", "--g", "3", "--c", "1", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        &["solve", "--p", "9", "--g", "2", "--c", "1"][..],
        &["solve", "--p", "7", "--g", "14", "--c", "1"],
        &["solve", "--p", "7", "--e", "0", "--g", "3", "--c", "1"],
        &["solve", "--p", "7", "--g", "3", "--c", "1", "--x-range", "5..x"],
        &["solve", "--p", "7", "--g", "3"],
        &["frobnicate"],
        &["pairs", "--p", "2", "--e", "3", "--g", "3"],
    ] {
        let out = welch(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_small_sweep_passes_and_is_deterministic() {
    let args = ["verify", "--max-modulus", "60", "--seed", "7", "--samples", "16"];
    let a = welch(&args);
    let b = welch(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["theorems"].as_array().unwrap().iter().all(|t| t["failures"] == 0));
}

#[test]
fn text_and_json_formats_differ() {
    let j = welch(&["solve", "--p", "5", "--g", "2", "--c", "2"]);
    let t = welch(&["solve", "--p", "5", "--g", "2", "--c", "2", "--format", "text"]);
    assert_eq!(t.status.code(), Some(0));
    assert_ne!(j.stdout, t.stdout);
}
