use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwasawa")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (out.status.code().unwrap(), v)
}

fn document(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("iwasawa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn zeta_at_minus_one() {
    let (code, v) = json(&["lp", "--chi", "mod=1", "--s", "-1", "--prime", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["version"], 1);
    assert_eq!(v["result"]["value"]["rational"], "1/6");
    assert!(v["result"]["interpolation"]["agreement"].as_i64().unwrap() >= 22);
    assert!(v["result"]["truncation"]["terms"].as_u64().unwrap() > 0);
}

#[test]
fn residue_over_q() {
    let (code, v) = json(&["stark", "--field", "Q", "--prime", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["residue"]["value"]["rational"], "4/5");
    assert!(v["result"]["interpolation_identity"]["gamma_agreement"].as_i64().unwrap() >= 12);
}

#[test]
fn quadratic_value_at_one_is_finite() {
    let (code, v) = json(&["lp", "--chi", "mod=8", "--s", "1", "--prime", "7", "--S", "2,7"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["pole"], false);
    assert_eq!(v["result"]["value"]["zero"], false);
    assert_eq!(v["result"]["S"], serde_json::json!([2, 7]));
}

#[test]
fn stark_check_for_sqrt5() {
    let (code, v) = json(&["stark", "--field", "Q(sqrt5)", "--prime", "11"]);
    assert_eq!(code, 0);
    assert!(v["result"]["stark"]["digits"].as_i64().unwrap() >= 15);
    assert_eq!(v["result"]["S"], serde_json::json!([5, 11]));
}

#[test]
fn single_t_piece() {
    let doc = document(
        "t.json",
        r#"{ "p": 5, "degrees": [-1, 0], "ranks": [1, 1], "differentials": { "-1": [["T"]] }, "trivialization_unit": "3 + T" }"#,
    );
    let (code, v) = json(&["analyze", doc.to_str().unwrap(), "--dvr"]);
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["r_gamma"], -1);
    assert_eq!(r["characteristic_element"]["t_order"], -1);
    assert_eq!(r["leading_term"]["bockstein_route"]["rational"], "3");
    assert_eq!(r["dvr"]["counts"]["t"], 1);
    assert_eq!(r["dvr"]["reassembles"], true);
}

#[test]
fn empty_complex() {
    let doc = document("empty.json", r#"{ "p": 7 }"#);
    let (code, v) = json(&["analyze", doc.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["r_gamma"], 0);
    assert_eq!(v["result"]["leading_term"]["bockstein_route"]["rational"], "1");
}

#[test]
fn d_squared_nonzero_is_rejected() {
    let doc = document(
        "bad.json",
        r#"{ "p": 5, "degrees": [0, 2], "ranks": [1, 1, 1], "differentials": { "0": [["1"]], "1": [["1"]] } }"#,
    );
    let (code, v) = json(&["analyze", doc.to_str().unwrap()]);
    assert_ne!(code, 0);
    assert_eq!(v["error"]["kind"], "NotAComplex");
}

#[test]
fn jordan_block_does_not_decompose() {
    let doc = document(
        "jordan.json",
        r#"{ "p": 5, "degrees": [0, 1], "ranks": [2, 2], "differentials": { "0": [["T", "1"], ["0", "T"]] } }"#,
    );
    let (code, v) = json(&["decompose", doc.to_str().unwrap()]);
    assert_ne!(code, 0);
    assert_eq!(v["error"]["kind"], "NotSemisimpleOverR");
}

#[test]
fn low_precision_is_refused() {
    let out = run(&["lp", "--chi", "mod=1", "--s", "-1", "--prime", "3", "--p-prec", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    let a = run(&["selftest", "--suite", "9", "--suite", "3", "--trials", "3", "--output", "json"]);
    let b = run(&["selftest", "--suite", "9", "--suite", "3", "--trials", "3", "--output", "json", "--parallel"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["lp", "--chi", "mod=12", "--s", "-3", "--prime", "5", "--output", "json"]);
    let d = run(&["lp", "--chi", "mod=12", "--s", "-3", "--prime", "5", "--output", "json"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn corrupted_sign_fails_the_route_suite() {
    let out = run(&["selftest", "--suite", "1", "--trials", "60", "--corrupt-sign"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("FAIL criterion 1"));
}
