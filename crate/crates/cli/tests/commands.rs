use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_iwasawa");

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).env_remove("IWASAWA_CACHE_DIR").output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn payload(stdout: &str) -> Value {
    serde_json::from_str::<Value>(stdout).unwrap()["payload"].clone()
}

#[test]
fn analyze_regular_prime() {
    let (code, out, _) = run(&["analyze", "-p", "5"]);
    assert_eq!(code, 0);
    let report = &payload(&out)["reports"][0];
    assert_eq!(report["r0"], 0);
    assert_eq!(report["km_verdict"], true);
    assert_eq!(report["flags"]["semiregular_assumed"], true);
}

#[test]
fn analyze_rejects_non_primes() {
    for p in ["4", "2", "1", "9"] {
        let (code, out, err) = run(&["analyze", "-p", p]);
        assert_eq!(code, 2, "p = {p}");
        assert!(out.is_empty());
        assert!(err.contains("not an odd prime"));
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["analyze"]).0, 2);
    assert_eq!(run(&["scan", "--pmin", "50", "--pmax", "10"]).0, 2);
    assert_eq!(run(&["congruence", "-p", "37", "-i", "4", "-n", "0"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn congruence_p37_n0() {
    let (code, out, _) = run(&["congruence", "-p", "37", "-i", "5", "-n", "0"]);
    assert_eq!(code, 0);
    let c = payload(&out);
    assert_eq!(c["t_n"], 32);
    assert_eq!(c["verdict"], "pass");
    assert_eq!(c["terms"][0]["path"], "exact-rational");
}

#[test]
fn regular_index_congruence_is_a_domain_error() {
    assert_eq!(run(&["congruence", "-p", "37", "-i", "3", "-n", "0"]).0, 2);
}

#[test]
fn zero_certificate_csv() {
    let (code, out, _) = run(&["zero", "-p", "37", "-i", "5", "--precision", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,t_n"));
    assert_eq!(lines.next(), Some("0,32"));
}

#[test]
fn scan_writes_report_file_and_cross_checks_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("scan.json");
    let pairs = dir.path().join("pairs.txt");
    std::fs::write(&pairs, "37 32\n").unwrap();
    let (code, out, _) = run(&[
        "scan", "--pmin", "30", "--pmax", "40", "--jobs", "2",
        "--pairs", pairs.to_str().unwrap(), "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let primes: Vec<u64> = doc["payload"]["reports"].as_array().unwrap().iter().map(|r| r["prime"].as_u64().unwrap()).collect();
    assert_eq!(primes, vec![31, 37]);
    assert_eq!(doc["payload"]["pairs_crosscheck"], Value::Array(vec![]));

    std::fs::write(&pairs, "37 30\n").unwrap();
    let (code, _, _) = run(&["scan", "--pmin", "37", "--pmax", "37", "--pairs", pairs.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn scan_csv_rows() {
    let (code, out, _) = run(&["scan", "--pmin", "3", "--pmax", "40", "--format", "csv", "--nmax", "0"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "prime,r0,lambda,nu,km_verdict,irregular,checks_pass");
    assert_eq!(rows.len(), 1 + 11);
    assert!(rows.iter().any(|r| r.starts_with("37,1,1,1,true,32:5:1:1,true")));
}

#[test]
fn selftest_passes() {
    let (code, out, _) = run(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    assert!(payload(&out)["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["analyze", "-p", "37", "--nmax", "0"])
        .env("IWASAWA_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
}
