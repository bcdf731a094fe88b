use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isograd")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn fails(args: &[&str], exit: i32, code: &str) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(exit), "{:?}", args);
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], code, "{}", err);
    assert!(err["detail"].is_string());
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("isograd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn dim_examples() {
    assert_eq!(ok(&["dim", &path("single.json")])["dimension"], 0);
    assert_eq!(ok(&["dim", &path("gap2_zero.json")])["dimension"], 2);
    let three = ok(&["dim", &path("three_blocks.json")]);
    assert_eq!(three["dimension"], 6);
    let deltas: Vec<_> = three["pairs"].as_array().unwrap().iter().map(|p| p["delta"].clone()).collect();
    assert_eq!(deltas, [json!(1), json!(3), json!(2)]);
}

#[test]
fn normalize_examples() {
    let nf = ok(&["normalize", &path("gap2_cube.json")]);
    assert_eq!(nf["blocks"]["1,2"], json!([[{"1": "1/2"}]]));
    assert_eq!(nf["verified"], true);

    let zero = ok(&["normalize", &path("gap2_zero.json")]);
    assert_eq!(zero["blocks"]["1,2"], json!([[{}]]));
    assert_eq!(zero["gauge"]["1,2"], json!([[{}]]));

    let a = run(&["normalize", &path("three_blocks.json")]);
    let b = run(&["normalize", &path("three_blocks.json")]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn equiv_examples() {
    let same = ok(&["equiv", &path("gap2_cube.json"), &path("gap2_cube.json")]);
    assert_eq!(same["equivalent"], true);

    let moved = scratch("moved.json");
    let moved = moved.to_str().unwrap();
    assert_eq!(run(&["act", &path("gap2_gauge.json"), "--output", moved]).status.code(), Some(0));
    let verdict = ok(&["equiv", &path("gap2_gauge.json"), moved]);
    assert_eq!(verdict["equivalent"], true);
    assert!(verdict["witness"].is_object());

    let apart = ok(&["equiv", &path("gap2_one.json"), &path("gap2_z.json")]);
    assert_eq!(apart, json!({"equivalent": false}));

    fails(&["equiv", &path("gap2_one.json"), &path("three_blocks.json")], 3, "spec");
}

#[test]
fn ext_sum_scale_examples() {
    let ext = ok(&["ext", &path("gap2_zero.json")]);
    assert_eq!(ext["delta"], 2);
    assert_eq!(ext["basis"], json!([[[{"0": "1"}]], [[{"1": "1"}]]]));

    let zero = ok(&["scale", "0", &path("gap2_cube.json")]);
    assert_eq!(zero["split"], true);
    assert_eq!(zero["coordinates"], json!(["0", "0"]));

    let sum = ok(&["sum", &path("gap2_one.json"), &path("gap2_z.json")]);
    assert_eq!(sum["coordinates"], json!(["1", "1"]));
    let neg = ok(&["scale", "-1/2", &path("gap2_z.json")]);
    assert_eq!(neg["coordinates"], json!(["0", "-1/2"]));

    fails(&["ext", &path("three_blocks.json")], 3, "spec");
}

#[test]
fn hom_and_basechange() {
    let hom = ok(&["hom", &path("single.json")]);
    assert_eq!(hom["basis"].as_array().unwrap().len(), 1);
    let wide = ok(&["hom", &path("single.json"), "--window", "-3", "3"]);
    assert_eq!(wide["basis"].as_array().unwrap().len(), 1);

    let report = ok(&["basechange", &path("gap2_cube.json"), "--ring", r#"{"kind":"quotient","modulus":["0","0","1"]}"#]);
    assert_eq!(report["all_passed"], true);
}

#[test]
fn output_flag_and_verification() {
    let out = scratch("nf.json");
    let out_s = out.to_str().unwrap();
    let printed = run(&["normalize", &path("mixed_ranks.json"), "--output", out_s]);
    assert_eq!(printed.status.code(), Some(0));
    assert!(printed.stdout.is_empty());
    let written = std::fs::read(&out).unwrap();
    assert_eq!(written, run(&["normalize", &path("mixed_ranks.json")]).stdout);

    assert_eq!(ok(&["normalize", &path("mixed_ranks.json"), "--verify-only", out_s])["verified"], true);
    assert_eq!(ok(&["verify", &path("mixed_ranks.json"), out_s])["verified"], true);

    // A certificate for a different source fails.
    let out = run(&["verify", &path("gap2_one.json"), &path("gap2_gauge.json")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn error_objects_and_exit_codes() {
    fails(&["dim"], 1, "usage");
    fails(&["frobnicate"], 1, "usage");
    fails(&["dim", "/nonexistent/problem.json"], 2, "io");

    let bad = scratch("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    fails(&["dim", bad.to_str().unwrap()], 2, "parse");

    let unsorted = scratch("unsorted.json");
    std::fs::write(
        &unsorted,
        r#"{"q":"2","coeff_ring":{"kind":"Q"},"graded":[{"rank":1,"slope":2,"A0":[["1"]]},{"rank":1,"slope":0,"A0":[["1"]]}]}"#,
    )
    .unwrap();
    fails(&["dim", unsorted.to_str().unwrap()], 2, "module");

    let singular = scratch("singular.json");
    std::fs::write(&singular, r#"{"q":"2","coeff_ring":{"kind":"Q"},"graded":[{"rank":1,"slope":0,"A0":[["0"]]}]}"#).unwrap();
    fails(&["dim", singular.to_str().unwrap()], 2, "not-invertible");

    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
