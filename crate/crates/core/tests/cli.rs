use std::path::Path;
use std::process::Command;

use clap::Parser;
use serde_json::Value;

use closedwalk::cli::{run, Cli, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use closedwalk::quadrature::MomentBatch;
use closedwalk::Series;

fn invoke(args: &[&str]) -> (i32, String) {
    let mut argv = vec!["closedwalk"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).expect("arguments parse");
    let mut out = Vec::new();
    let code = run(&cli, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = invoke(args);
    assert_eq!(code, EXIT_OK, "{args:?}");
    serde_json::from_str(&out).unwrap()
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_closedwalk"))
}

#[test]
fn coeffs_bcc_table_ends_with_order_twelve() {
    let (code, out) = invoke(&["coeffs", "--lattice", "bcc", "--max-order", "12", "--format", "table"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.trim_end().ends_with("5929/3600"), "{out}");
    assert!(!out.contains('.'), "table must print exact rationals");
}

#[test]
fn coeffs_finite_ring_of_three() {
    let doc = json(&["coeffs", "--lattice", "chain-nn-finite", "--pbc", "3", "--max-order", "6"]);
    let entry = doc["coefficients"].as_array().unwrap().iter().find(|e| e["index"] == serde_json::json!([3])).unwrap();
    assert_eq!(entry["num"], "1");
    assert_eq!(entry["den"], "3");
}

#[test]
fn coeffs_constant_term() {
    let doc = json(&["coeffs", "--lattice", "chain-nn", "--max-order", "0"]);
    let entries = doc["coefficients"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["num"], "1");
    assert_eq!(entries[0]["den"], "1");
}

#[test]
fn csv_and_json_encode_the_same_series() {
    for lattice in ["chain-nnn", "triangular", "diamond"] {
        let (_, j) = invoke(&["coeffs", "--lattice", lattice, "--max-order", "8"]);
        let (_, c) = invoke(&["coeffs", "--lattice", lattice, "--max-order", "8", "--format", "csv"]);
        assert_eq!(Series::from_json(&j).unwrap(), Series::from_csv(&c).unwrap(), "{lattice}");
    }
    let (_, j) = invoke(&["moments", "--lattice", "bcc", "--max-order", "6"]);
    let (_, c) = invoke(&["moments", "--lattice", "bcc", "--max-order", "6", "--format", "csv"]);
    let from_json: MomentBatch = serde_json::from_str(&j).unwrap();
    assert_eq!(from_json, MomentBatch::from_csv(&c).unwrap());
}

#[test]
fn verify_examples_pass() {
    let doc = json(&["verify", "--lattice", "honeycomb", "--max-order", "6"]);
    assert_eq!(doc["passed"], true);

    let doc = json(&["verify", "--all", "--max-order", "6"]);
    assert_eq!(doc["passed"], true);
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 7);
    assert!(reports.iter().all(|r| r["summary"]["failed"] == 0));

    let doc = json(&["verify", "--lattice", "chain-nnn", "--max-order", "12", "--recurrence"]);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["recurrence"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_failure_sets_exit_code_and_embeds_both_sides() {
    let (code, out) = invoke(&["verify", "--lattice", "triangular", "--max-order", "4", "--grid", "2"]);
    assert_eq!(code, EXIT_FAILED);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let failed = doc["reports"][0]["records"].as_array().unwrap().iter().find(|r| r["pass"] == false).unwrap();
    assert!(failed["exact"].is_string());
    assert!(failed["numeric"].is_number());
}

#[test]
fn conjecture_records() {
    let doc = json(&["conjecture", "--n-max", "30"]);
    let records = doc.as_array().unwrap();
    assert_eq!(records.len(), 15);
    assert!(records.iter().all(|r| r["is_square"] == true && r["root"].is_string()));
}

#[test]
fn oracle_triangular_length_six() {
    let doc = json(&["oracle", "--lattice", "triangular", "--n", "6"]);
    assert_eq!(doc["total"], "2040");
}

#[test]
fn oracle_reads_a_lattice_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("honeycomb.json");
    let (code, _) = invoke(&["lattice", "--lattice", "honeycomb", "--output", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let doc = json(&["oracle", "--lattice-file", path.to_str().unwrap(), "--n", "2"]);
    assert_eq!(doc["total"], "6");
}

#[test]
fn appendix_b_phi_half() {
    let doc = json(&["appendix-b", "--pbc", "4", "--rho", "0.5", "--phi-half"]);
    assert!(doc["phi_half_residual"].as_f64().unwrap() <= 1e-10);
    let (code, _) = invoke(&["appendix-b", "--pbc", "5", "--rho", "0.5", "--phi-half"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["coeffs", "--lattice", "nope", "--max-order", "3"][..],
        &["coeffs", "--max-order", "3"],
        &["coeffs", "--lattice", "chain-nn-finite", "--max-order", "3"],
        &["coeffs", "--lattice", "chain-nn-finite", "--pbc", "2", "--max-order", "3"],
        &["oracle", "--lattice", "diamond", "--n", "40"],
        &["moments", "--lattice", "bcc", "--max-order", "4", "--grid", "zero"],
        &["verify", "--lattice", "bcc", "--max-order", "4", "--rel-tol", "0"],
    ] {
        assert_eq!(invoke(args).0, EXIT_USAGE, "{args:?}");
    }
}

#[test]
fn binary_exit_codes_and_streams() {
    let ok = binary().args(["coeffs", "--lattice", "triangular", "--max-order", "6"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let series = Series::from_json(std::str::from_utf8(&ok.stdout).unwrap()).unwrap();
    assert_eq!(series.max_order(), 6);

    let bad = binary().args(["coeffs", "--lattice", "nope", "--max-order", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(bad.stdout.is_empty());
    assert!(!bad.stderr.is_empty());

    let unparsable = binary().args(["coeffs", "--max-order", "x"]).output().unwrap();
    assert_eq!(unparsable.status.code(), Some(EXIT_USAGE));

    let failing = binary().args(["verify", "--lattice", "bcc", "--max-order", "4", "--grid", "2"]).output().unwrap();
    assert_eq!(failing.status.code(), Some(EXIT_FAILED));
}

fn run_to_file(dir: &Path, name: &str, threads: &str, args: &[&str]) -> Vec<u8> {
    let status = binary()
        .args(args)
        .args(["--output", name])
        .env("CLOSEDWALK_OUTPUT_DIR", dir)
        .env("CLOSEDWALK_THREADS", threads)
        .status()
        .unwrap();
    assert!(status.success(), "{args:?}");
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 4] = [
        &["verify", "--all", "--max-order", "5"],
        &["moments", "--lattice", "diamond", "--max-order", "8", "--format", "csv"],
        &["coeffs", "--lattice", "chain-nnn", "--max-order", "10", "--format", "csv"],
        &["appendix-b", "--pbc", "6", "--rho", "1.0", "--phi-half"],
    ];
    for (i, args) in commands.iter().enumerate() {
        let a = run_to_file(dir.path(), &format!("a{i}"), "1", args);
        let b = run_to_file(dir.path(), &format!("b{i}"), "4", args);
        let c = run_to_file(dir.path(), &format!("c{i}"), "4", args);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
        assert_eq!(b, c, "{args:?}");
    }
}
