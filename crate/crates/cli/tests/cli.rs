use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polywedge")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(&run(&["validate", &data("cube.json")])), 0);
    assert_eq!(code(&run(&["validate", &data("cube_a3.json")])), 0);
    let bad = run(&["validate", &data("bad_cube.json")]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("simplicity"));
    // the prism map is dependent at a vertex
    assert_eq!(code(&run(&["validate", &data("prism.json")])), 1);
    assert_eq!(code(&run(&["validate", "no-such-file.json"])), 2);
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"dim\": 2, \"facets\": ").unwrap();
    assert_eq!(code(&run(&["info", path.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["wedge", &data("square.json"), "--facet", "nope", "--k", "1"])), 2);
    assert_eq!(code(&run(&["torsion", &data("square.json"), "--prime", "9"])), 2);
}

#[test]
fn info_reports_orders_as_json() {
    let v = json(&run(&["info", &data("square.json"), "--format", "json"]));
    assert_eq!(v["f_vector"], serde_json::json!([4, 4]));
    assert_eq!(v["orders"], serde_json::json!([1, 17, 47, 4]));
}

#[test]
fn wedge_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let o = out.to_str().unwrap();
    assert_eq!(code(&run(&["wedge", &data("square.json"), "--facet", "F4", "--k", "2", "--a", "2", "-o", o])), 0);
    assert_eq!(code(&run(&["validate", o])), 0);
    let v = json(&run(&["info", o, "--format", "json"]));
    assert_eq!(v["dim"], 4);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 8);
    // and a second wedge of the output
    let out2 = dir.path().join("w2.json");
    assert_eq!(code(&run(&["wedge", o, "--facet", "H", "--k", "1", "-o", out2.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["validate", out2.to_str().unwrap()])), 0);
}

#[test]
fn blowup_then_blowdown_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let up = dir.path().join("up.json");
    let u = up.to_str().unwrap();
    assert_eq!(code(&run(&["blowup", &data("cube_a3.json"), "--face", "F0,Ft", "--vector", "-2,1,1", "-o", u])), 0);
    let v = json(&run(&["info", u, "--format", "json"]));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 10);
    // the map needs a vector on the new facet
    assert_eq!(code(&run(&["blowup", &data("cube_a3.json"), "--face", "F0,Ft"])), 2);
    let down = dir.path().join("down.json");
    let d = down.to_str().unwrap();
    assert_eq!(code(&run(&["blowdown", &data("cube_a3.json"), "--facet", "Ft", "--face", "Ft,F1", "-o", d])), 0);
    let v = json(&run(&["info", d, "--format", "json"]));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    // a square collapsed onto a corner is not of product type
    assert_eq!(code(&run(&["blowdown", &data("cube.json"), "--facet", "Ft", "--face", "Ft,F0,F2"])), 1);
}

#[test]
fn trace_with_a_start() {
    let v = json(&run(&["trace", &data("cube_235.json"), "--start", "v0,v1,v2", "--format", "json"]));
    assert_eq!(v["trace"], serde_json::json!([5, 9, 16, 1, 7, 1, 1, 1]));
    let bad = run(&["trace", &data("square.json"), "--order", "v0,v2,v1,v3"]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn torsion_exit_codes_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let c = cert.to_str().unwrap();
    let ok = run(&["torsion", &data("cube_a3.json"), "--blowdown", "--facet", "Ft", "--face", "Ft,F1", "--prime", "5", "-o", c]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert_eq!(code(&run(&["torsion", c, "--replay"])), 0);
    // a tampered certificate no longer replays
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    v["prime"] = 3.into();
    std::fs::write(&cert, v.to_string()).unwrap();
    assert_eq!(code(&run(&["torsion", c, "--replay"])), 1);
    // inconclusive exits 1
    let refused = run(&["torsion", &data("cube_a3.json"), "--blowdown", "--facet", "Ft", "--face", "Ft,F1", "--prime", "3"]);
    assert_eq!(code(&refused), 1);
    assert!(stdout(&refused).contains("A3"));
    let wedge = run(&["torsion", &data("square.json"), "--wedge", "--facet", "F4", "--a", "3", "--prime", "2"]);
    assert_eq!(code(&wedge), 1);
    assert!(stdout(&wedge).contains("Parameter"));
    let wedge = run(&["torsion", &data("square.json"), "--wedge", "--facet", "F4", "--a", "2", "--prime", "7", "--format", "json"]);
    assert_eq!(code(&wedge), 0);
    assert_eq!(json(&wedge)["conclusion"], "no-p-torsion");
}

#[test]
fn scan_and_dual() {
    let s = run(&["scan", &data("cube_a3.json"), "--format", "json"]);
    assert_eq!(code(&s), 0);
    assert_eq!(json(&s)["relevant_primes"], serde_json::json!([3]));
    let d = json(&run(&["dualize", &data("cube.json"), "--format", "json"]));
    assert_eq!(d["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(d["maximal"].as_array().unwrap().len(), 8);
}

#[test]
fn simplicial_wedge_vectors() {
    let v = json(&run(&["swedge", &data("square.json"), "--vertex", "F4", "--a", "2", "--format", "json"]));
    assert_eq!(v["maximal"].as_array().unwrap().len(), 8);
    let vectors = v["vectors"].as_object().unwrap();
    assert_eq!(vectors.len(), 6);
    assert_eq!(code(&run(&["swedge", &data("square.json"), "--vertex", "F4", "--a", "1"])), 1);
}
