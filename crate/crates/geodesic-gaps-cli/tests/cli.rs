//! Black-box tests of the `geogaps` binary: exit codes, output shapes, and
//! byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn geogaps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geogaps"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn write_loop_json(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("loop.json");
    std::fs::write(
        &path,
        r#"{"vertices":["v"],"edges":[{"id":"a","ends":["v"],"length":"1"}]}"#,
    )
    .unwrap();
    path
}

#[test]
fn unknown_subcommand_exits_64() {
    let out = geogaps(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn precondition_exits_2() {
    // 7 ≢ 0, 1 mod 4 is not a discriminant
    let out = geogaps(&["classnum", "--disc", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certification_failure_exits_3() {
    // a one-digit stream cannot certify any gap below 10⁻⁶
    let out = geogaps(&["bouquet", "verify", "--a", "0.5", "--C", "0.000001", "--count", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_input_exits_65() {
    let dir = std::env::temp_dir();
    let path = dir.join("geogaps_bad_input.json");
    std::fs::write(&path, "not json").unwrap();
    let out = geogaps(&["graph", "zeta", "--input", path.to_str().unwrap(), "--s", "1,0"]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn spectrum_row_count_and_determinism() {
    let out1 = geogaps(&["spectrum", "--max-trace", "100"]);
    assert_eq!(out1.status.code(), Some(0));
    let text = stdout(&out1);
    // header + one row per trace 3..=100
    assert_eq!(text.lines().count(), 99);
    assert!(text.starts_with("trace,value,multiplicity,digits_certified\n"));
    assert!(text.contains("3,2.61803398874e+0,1,12"));
    let out2 = geogaps(&["spectrum", "--max-trace", "100"]);
    assert_eq!(out1.stdout, out2.stdout, "output must be byte-identical");
}

#[test]
fn congruence_witness_matrix_matches() {
    let out = geogaps(&["congruence", "--level", "2", "--c-max", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        doc["witnesses"][0]["matrix"],
        serde_json::json!([["29", "-40"], ["8", "-11"]])
    );
    assert_eq!(doc["witnesses"][0]["det"], "1");
}

#[test]
fn loop_zeta_value() {
    let dir = tempdir();
    let path = write_loop_json(&dir);
    let out = geogaps(&["graph", "zeta", "--input", path.to_str().unwrap(), "--s", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    // (1 − e^{−1})² ≈ 0.399576
    assert!(stdout(&out).contains("+3.995764008937e-1"));
}

#[test]
fn quaternion_reports_flag_discrepancy() {
    let out = geogaps(&["quaternion", "--primes", "2,3", "--c-max", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let p2 = doc["reports"][0]["perPrime"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["p"] == 2)
        .unwrap();
    assert_eq!(p2["ramified"], true);
    assert_eq!(p2["conductorMaximal"], false);
}

#[test]
fn bouquet_construct_emits_certified_pairs() {
    let out = geogaps(&["bouquet", "construct", "--seed", "0.3", "--C", "0.001", "--stages", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let pairs = doc["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    for p in pairs {
        assert!(p["gapUpper"].as_f64().unwrap() < 1e-3);
        assert!(p["gapLower"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn selftests_pass() {
    for args in [
        vec!["spectrum", "--selftest", "--max-trace", "1"],
        vec!["classnum", "--selftest", "--disc", "5"],
        vec!["graph", "converge", "--selftest", "--family", "contract"],
        vec!["bouquet", "scan", "--selftest", "--a", "0.1"],
    ] {
        let out = geogaps(&args);
        assert_eq!(out.status.code(), Some(0), "selftest failed for {args:?}");
    }
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("geogaps-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
