use std::process::Command;

use num_bigint::BigUint;
use serde_json::Value;

use fivezero_core::wdist::WeightDistribution;

fn fivezero(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fivezero"))
        .arg("--quiet")
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn code_info_reports_five_zero_classes() {
    let (code, out) = fivezero(&["code-info"]);
    assert_eq!(code, 0);
    let doc = json(&out);
    assert_eq!(doc["status"], "pass");
    assert_eq!(doc["config"]["p"], 3);
    assert_eq!(doc["details"]["modulus"], "1,2,0,0,0,1");
    assert_eq!(doc["details"]["minimal_polynomials"].as_array().unwrap().len(), 5);
}

#[test]
fn csv_report_has_header_and_rows() {
    let (code, out) = fivezero(&["-k", "2", "code-info", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("name,expected,actual,pass"));
    assert!(lines.all(|l| l.ends_with(",true")));
}

#[test]
fn invalid_parameters_exit_2() {
    for args in [
        vec!["-p", "4", "code-info"],
        vec!["-p", "2", "code-info"],
        vec!["-m", "6", "code-info"],
        vec!["-m", "3", "code-info"],
        vec!["-k", "5", "code-info"],
        vec!["verify", "nothing"],
        vec!["--modulus", "1,0,0,0,0,1", "code-info"],
    ] {
        assert_eq!(fivezero(&args).0, 2, "{args:?}");
    }
}

#[test]
fn scan_over_budget_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = fivezero(&["-m", "7", "scan", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn closed_table_beyond_desk_scale() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out) = fivezero(&["-m", "7", "dist", "--mode", "closed", "--out-dir", d, "--format", "csv"]);
    assert_eq!(code, 0, "{out}");
    let text = std::fs::read_to_string(dir.path().join("weights-p3-m7-k1-closed.csv")).unwrap();
    let rows = WeightDistribution::rows_from_csv(&text).unwrap();
    let total: BigUint = rows.values().sum();
    assert_eq!(total, BigUint::from(3u32).pow(35));
    assert_eq!(rows[&0], BigUint::from(1u32));
}

#[test]
fn scan_cache_is_reused_and_rebuilt_when_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let scan = ["scan", "--skip-lemma-checks", "--cache-dir", d];
    let (code, first) = fivezero(&scan);
    assert_eq!(code, 0);
    assert_eq!(json(&first)["details"]["cache_reused"], false);
    let path = dir.path().join("scan-p3-m5-k1.txt");
    let cached = std::fs::read(&path).unwrap();

    let (_, second) = fivezero(&scan);
    assert_eq!(json(&second)["details"]["cache_reused"], true);

    std::fs::write(&path, "fivezero-scan v1 p=3 m=5 k=1 garbage\n").unwrap();
    let (code, third) = fivezero(&scan);
    assert_eq!(code, 0);
    assert_eq!(json(&third)["details"]["cache_reused"], false);
    assert_eq!(std::fs::read(&path).unwrap(), cached);
}

#[test]
fn json_weight_table_lists_discrepancies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, _) = fivezero(&["dist", "--mode", "closed", "--out-dir", d]);
    assert_eq!(code, 0);
    let doc = json(&std::fs::read_to_string(dir.path().join("weights-p3-m5-k1-closed.json")).unwrap());
    assert_eq!(doc["kind"], "weight-distribution");
    let ids: Vec<&str> = doc["discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["id"].as_str().unwrap())
        .collect();
    assert!(ids.contains(&"weight-row-2n1"));
    assert!(ids.contains(&"minimum-distance"));
}

#[test]
fn explicit_modulus_is_used() {
    let (code, out) = fivezero(&["--modulus", "1,0,0,0,2,1", "code-info"]);
    assert_eq!(code, 0);
    let doc = json(&out);
    assert_eq!(doc["details"]["modulus"], "1,0,0,0,2,1");
    assert_eq!(doc["config"]["modulus"], "1,0,0,0,2,1");
}
