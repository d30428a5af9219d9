use std::process::{Command, Output};

use serde_json::Value;

fn gapforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapforge")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = gapforge(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    assert_eq!(v["schema"], "gapforge.report/1");
    v
}

#[test]
fn threegap_table_for_log10_2() {
    let v = report(&["threegap", "--alpha", "dec:0.301029995663981:15", "--n", "100", "--r", "3", "--table"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["breakpoints"], serde_json::json!([1, 71, 74, 81, 84, 91, 94]));
    assert_eq!(v["frame"]["left"], serde_json::json!([74, 84, 94]));
    assert_eq!(v["frame"]["right"], serde_json::json!([11, 21, 31]));
    assert_eq!(v["intervals"].as_array().unwrap().len(), 7);
    assert_eq!(v["soundness"]["holds"], true);
}

#[test]
fn verify_is_reproducible() {
    let args = ["verify", "--suite", "dcd", "--trials", "10", "--seed", "1"];
    let first = gapforge(&args);
    let second = gapforge(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["passed"], 10);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["pass"], true);
}

#[test]
fn replay_matches_sweep_record() {
    let sweep = report(&["verify", "--suite", "steinhaus", "--trials", "6", "--seed", "9", "--n", "300"]);
    let one =
        report(&["verify", "--suite", "steinhaus", "--trials", "6", "--seed", "9", "--n", "300", "--replay", "4"]);
    assert_eq!(one["record"], sweep["records"][4]);
}

#[test]
fn verify_writes_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = gapforge(&["verify", "--suite", "duality", "--trials", "5", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "duality");
}

#[test]
fn csv_projection() {
    let out = gapforge(&["verify", "--suite", "dcd", "--trials", "4", "--seed", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("suite,seed,index,status,note"));
    assert_eq!(lines.filter(|l| l.starts_with("dcd,2,")).count(), 4);
}

#[test]
fn debruijn_three_symbols() {
    let v = report(&["debruijn", "--alphabet", "3", "--r", "2"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["sequence"].as_array().unwrap().len(), 12);
}

#[test]
fn sidon_generation_and_check() {
    let v = report(&["sidon", "--n", "8"]);
    assert_eq!(v["set"], serde_json::json!([1, 2, 4, 8, 13, 21, 31, 45]));
    let out = gapforge(&["sidon", "--check", "1,2,3,4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn extremal_emits_sets() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    let v = report(&["extremal", "--sidon-size", "4", "--r", "1", "--emit", path.to_str().unwrap()]);
    assert_eq!(v["k"], 12);
    let pair: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(pair["a"].as_array().unwrap().len(), 12);
    // Emitted sets read back as set arguments.
    let a = serde_json::to_string(&pair["a"]).unwrap();
    let b = serde_json::to_string(&pair["b"]).unwrap();
    let check = report(&["verify", "--suite", "main2", "--r", "1", "--a", &a, "--b", &b]);
    assert_eq!(check["pass"], true);
}

#[test]
fn sets_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    std::fs::write(&a, "1\n2\n4\n").unwrap();
    let v = report(&["verify", "--suite", "dcd2", "--r", "1", "--a", a.to_str().unwrap(), "--b", "0,1,2,3,4,5"]);
    assert_eq!(v["result"]["holds"], true);
}

#[test]
fn returning_and_duality() {
    let v = report(&["returning", "--theta", "5/13", "--phi", "3/10", "--r", "2", "--tmax", "2000"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["slater"]["invariants_hold"], true);
    let d = report(&["duality", "--p", "3", "--q", "7", "--n", "3", "--r", "1"]);
    assert_eq!(d["holds"], true);
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        &["threegap", "--alpha", "nonsense", "--n", "10"][..],
        &["verify", "--suite", "unknown"],
        &["verify", "--suite", "fp", "--q", "100"],
        &["duality", "--p", "2", "--q", "4", "--n", "2", "--r", "1"],
        &["debruijn", "--alphabet", "1", "--r", "2"],
        &["threegap"],
    ] {
        let out = gapforge(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}
