use std::process::{Command, Output};

use serde_json::Value;

fn padyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padyn")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = padyn(args);
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn classify_report() {
    let v = report(&["classify", "--map", "3,1,0", "--prime", "3"]);
    let c = &v["classification"];
    assert_eq!(c["case"]["id"], "C1");
    assert_eq!(c["x2"], "3");
    assert_eq!(c["siegel_x1"]["radius"], "3^(0)");
    assert_eq!(c["characters"][1]["kind"], "indifferent");
    assert_eq!(c["x2_geometry"]["kind"], "SiegelEqualsX1");
}

#[test]
fn general_map_is_canonicalized() {
    let v = report(&["classify", "--map", "4,-7,4,-2,2", "--prime", "3"]);
    assert_eq!(v["conjugacy"]["shift"], "1");
    assert_eq!(v["map"]["a"], "3");
    assert_eq!(v["map"]["d"], "0");
}

#[test]
fn orbit_of_fixed_point() {
    let v = report(&["orbit", "--map", "3,1,0", "--prime", "3", "--start", "0", "--steps", "3"]);
    let xs: Vec<&str> = v["orbit"].as_array().unwrap().iter().map(|r| r["x"].as_str().unwrap()).collect();
    assert_eq!(xs, ["0", "0", "0", "0"]);
}

#[test]
fn ergodic_on_sphere() {
    let v = report(&["ergodic", "--map", "4,8,-6", "--prime", "2", "--radius", "2^(-3)"]);
    assert_eq!(v["verdict"]["ergodic"], true);
    assert_eq!(v["verdict"]["condition"], 1);
    assert_eq!(v["verdict"]["agrees"], true);
    let v = report(&["ergodic", "--map", "4,8,-6", "--prime", "2", "--radius", "2^(-4)"]);
    assert_eq!(v["verdict"]["ergodic"], false);
}

#[test]
fn empirical_histogram_lines() {
    let v = report(&["ergodic", "--map", "4,8,-6", "--prime", "2", "--radius", "2^(-3)", "--empirical", "--seed", "3"]);
    let lines = v["empirical"]["lines"].as_array().unwrap();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "ball=1 count=1024 freq=1/4");
    let v = report(&["ergodic", "--map", "3,1,0", "--prime", "3", "--radius", "3^(-2)", "--empirical", "--depth", "2"]);
    assert_eq!(v["verdict"]["invariant_ball"]["measure"], "1/18");
    assert!(!v["empirical"]["unvisited"].as_array().unwrap().is_empty());
}

#[test]
fn norm_orbit_trace() {
    let v = report(&["norm-orbit", "--map", "1/3,1,0", "--prime", "3", "--radius", "3^(-1/2)", "--steps", "3"]);
    assert_eq!(v["case"]["id"], "C3");
    assert_eq!(v["trace"][1]["radius"], "3^(0)");
    assert_eq!(v["limit"]["converges_to"], "3^(1)");
}

#[test]
fn preimages_and_measure() {
    let v = report(&["preimage", "--map", "1/9,-1,0", "--prime", "3", "--y", "-1"]);
    let pre = v["preimages"].as_array().unwrap();
    assert_eq!(pre.len(), 2);
    assert!(pre.iter().all(|x| x["norm"] == "3^(-1)"));
    let v = report(&["measure", "--prime", "3", "--radius", "3^(0)", "--ball", "3^(-1)"]);
    assert_eq!(v["measure"], "1/2");
}

#[test]
fn verify_suite() {
    let v = report(&["verify", "--suite", "tpk"]);
    assert_eq!(v["report"]["passed"], true);
}

#[test]
fn domain_errors_exit_one() {
    let out = padyn(&["measure", "--prime", "3", "--radius", "3^(0)", "--ball", "3^(0)"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "BallExceedsSphere");
    let out = padyn(&["classify", "--map", "2/3,8,-6", "--prime", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"], "UnhandledBoundary");
    let out = padyn(&["ergodic", "--map", "3,1,0", "--prime", "3", "--radius", "3^(-1)"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(padyn(&["classify", "--prime", "3"]).status.code(), Some(2));
    assert_eq!(padyn(&["classify", "--map", "1,x,0", "--prime", "3"]).status.code(), Some(2));
    assert_eq!(padyn(&["classify", "--map", "3,1,0", "--prime", "4"]).status.code(), Some(2));
    assert_eq!(padyn(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["ergodic", "--map", "4,8,-6", "--prime", "2", "--radius", "2^(-4)", "--empirical", "--seed", "11"];
    assert_eq!(padyn(&args).stdout, padyn(&args).stdout);
    let args = ["verify", "--suite", "isometry", "--samples", "5", "--seed", "4"];
    assert_eq!(padyn(&args).stdout, padyn(&args).stdout);
}

// every radius and rational printed re-parses to an equal value
#[test]
fn printed_values_round_trip() {
    let v = report(&["classify", "--map", "1/2,8,-6", "--prime", "2"]);
    let r = v["classification"]["x2_geometry"]["radius"].as_str().unwrap();
    let again = report(&["norm-orbit", "--map", "1/2,8,-6", "--prime", "2", "--radius", r, "--steps", "1"]);
    assert_eq!(again["trace"][0]["radius"], r);
    let x2 = v["classification"]["x2"].as_str().unwrap();
    let orbit = report(&["orbit", "--map", "1/2,8,-6", "--prime", "2", "--start", x2, "--steps", "2"]);
    assert!(orbit["orbit"].as_array().unwrap().iter().all(|row| row["x"] == x2));
    let m = &v["map"];
    let coeffs = format!("{},{},{}", m["a"].as_str().unwrap(), m["b"].as_str().unwrap(), m["d"].as_str().unwrap());
    let again = report(&["classify", "--map", &coeffs, "--prime", "2"]);
    assert_eq!(again, v);
}

#[test]
fn out_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("padyn-out-{}.json", std::process::id()));
    let out = padyn(&["classify", "--map", "3,1,0", "--prime", "3", "--out", path.to_str().unwrap()]);
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, out.stdout);
}
