use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn gh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gh"))
        .args(args)
        .env_remove("GHLAB_BACKEND")
        .env_remove("GHLAB_OUT")
        .env_remove("GHLAB_INJECT_FAULT")
        .output()
        .expect("gh runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is json")
}

#[test]
fn w1_two_point() {
    let out =
        gh(&["--backend", "rational", "dist", "w1", "--space", &data("two_point.json"), "--mu", "[1, 0]", "--nu", r#"["1/2", "1/2"]"#]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["value"], "1/2");
    assert_eq!(v["certificate"]["primal"], "1/2");

    let out = gh(&["dist", "w1", "--space", &data("two_point.json"), "--mu", "[1, 0]", "--nu", "[0.5, 0.5]"]);
    assert_eq!(json_of(&out)["value"], 0.5);
}

#[test]
fn malformed_matrix_exits_2() {
    let out = gh(&["dist", "w1", "--space", &data("malformed.json"), "--mu", "[1,0,0]", "--nu", "[0,0,1]"]);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "AxiomViolation");
    assert_eq!(diag["violations"][0], "triangle at (0,2) via 1");
}

#[test]
fn io_and_parse_codes() {
    assert_eq!(gh(&["hausdorff", "--space", "/no/such/file.json", "--a", "0", "--b", "0"]).status.code(), Some(3));
    assert_eq!(gh(&["delta-r", "--glued", &data("i2_i.json"), "-r", "two"]).status.code(), Some(4));
    assert_eq!(gh(&["verify", "--suite", "nonsense"]).status.code(), Some(4));
}

#[test]
fn delta_r_interval_example() {
    let out = gh(&["--backend", "rational", "dist", "delta-r", "--glued", &data("i2_i.json"), "-r", "2"]);
    let v = json_of(&out);
    assert_eq!(v["value"], "1/3");
    assert_eq!(v["certificate"]["closed_form"], "1/3");
    assert_eq!(v["mode"], "exact");
}

#[test]
fn extent_of_interval_tunnel() {
    let v = json_of(&gh(&["--backend", "rational", "extent", "--passage", &data("tunnel.json"), "-r", "2"]));
    assert_eq!(v["value"], "1/3");
    assert_eq!(v["certificate"]["admissible"], true);
}

#[test]
fn propinquity_and_inframetric() {
    let v = json_of(&gh(&["--backend", "rational", "propinquity", "--x", &data("i2.json"), "--y", &data("i.json")]));
    assert_eq!(v["value"]["exact"], "1/4*sqrt(2)");
    assert_eq!(v["mode"], "exhaustive");
    let v = json_of(&gh(&["--backend", "rational", "inframetric", "--x", &data("i2.json"), "--y", &data("i.json")]));
    assert_eq!(v["value"], "1/2");
}

#[test]
fn csv_input() {
    let v = json_of(&gh(&["--backend", "rational", "hausdorff", "--space", &data("square.csv"), "--a", "0", "--b", "1,2"]));
    assert_eq!(v["value"], "2");
}

#[test]
fn env_override_and_out_file() {
    let out_path = std::env::temp_dir().join(format!("ghlab-cli-test-{}.json", std::process::id()));
    let out = Command::new(env!("CARGO_BIN_EXE_gh"))
        .args(["dist", "delta-r", "--glued", &data("i2_i.json"), "-r", "2"])
        .env("GHLAB_BACKEND", "rational")
        .env("GHLAB_OUT", &out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    std::fs::remove_file(&out_path).ok();
    assert_eq!(v["value"], "1/3");
}

#[test]
fn verify_is_reproducible() {
    let args = ["--backend", "rational", "--seed", "7", "verify", "--suite", "all", "--cases", "5"];
    let a = gh(&args);
    let b = gh(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a)["passed"], true);
}

#[test]
fn injected_fault_is_reported() {
    let out = gh(&["--backend", "rational", "verify", "--suite", "kantorovich", "--cases", "5", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    let check = &v["suites"][0]["checks"][0];
    assert_eq!(check["name"], "primal_equals_dual");
    assert!(check["failures"].as_u64().unwrap() > 0);
    assert!(!check["counterexamples"].as_array().unwrap().is_empty());
}

#[test]
fn verify_fundamental_lists_clauses() {
    let out = gh(&["--backend", "rational", "verify", "--suite", "fundamental", "--cases", "10"]);
    let v = json_of(&out);
    let names: Vec<&str> = v["suites"][0]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["fundamental_random", "target_inversion", "diameter_saturation"]);
}
