use assert_cmd::Command;
use rug::ops::Pow;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::cargo_bin("cubesum").unwrap().args(args).env_remove("CUBESUM_PREC_BITS").output().unwrap();
    let code = out.status.code().unwrap();
    let v = if out.stdout.is_empty() { Value::Null } else { serde_json::from_slice(&out.stdout).unwrap() };
    (code, v)
}

#[test]
fn structure_passes() {
    let (code, v) = run(&["structure"]);
    assert_eq!(code, 0);
    assert_eq!(v["cusps"].as_array().unwrap().len(), 12);
    assert_eq!(v["normalizer"]["rows"].as_array().unwrap().len(), 12);
    assert!(v["normalizer"]["rows"].as_array().unwrap().iter().all(|r| r["cusp_ok"] == true && r["normalizes"] == true));
}

#[test]
fn certify_eleven() {
    let (code, v) = run(&["certify", "--n", "11"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "cube_sum");
    assert_eq!(v["verified"], true);
    let a: rug::Rational = v["a"].as_str().unwrap().parse().unwrap();
    let b: rug::Rational = v["b"].as_str().unwrap().parse().unwrap();
    assert_eq!(a.pow(3) + b.pow(3), 22);
}

#[test]
fn certify_cube_is_usage_error() {
    let (code, v) = run(&["certify", "--n", "27"]);
    assert_eq!(code, 2);
    assert_eq!(v, Value::Null);
}

#[test]
fn gz_eleven() {
    let (code, v) = run(&["gz", "--primes", "11", "--signs", "+"]);
    assert_eq!(code, 0);
    let r: f64 = v["ratio_error"].as_f64().unwrap();
    assert!(r < 1e-8);
}

#[test]
fn bad_usage() {
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["gz", "--primes", "11"]).0, 2);
    assert_eq!(run(&["gz", "--primes", "7", "--signs", "+"]).0, 2);
    assert_eq!(run(&["--prec", "16", "structure"]).0, 2);
}

#[test]
fn env_precision_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::cargo_bin("cubesum")
        .unwrap()
        .args(["lvalue", "--k", "1"])
        .env("CUBESUM_PREC_BITS", "128")
        .env("CUBESUM_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let text = std::fs::read_to_string(files[0].as_ref().unwrap().path()).unwrap();
    assert!(text.starts_with("# curve k=1/1; sha256="));
    assert!(text.lines().any(|l| l == "7,-4"));
    assert!(text.lines().any(|l| l == "5,0"));
}

#[test]
fn text_output() {
    let out = Command::cargo_bin("cubesum").unwrap().args(["--output", "text", "lvalue", "--n", "11"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("sign: -1"));
}
