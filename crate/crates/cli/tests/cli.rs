//! End-to-end checks of the command-line surface: exit codes, file formats
//! and conformance of every JSON output to the shipped schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flagqec"))
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn validate(schema_file: &str, value: &serde_json::Value) {
    let schema_text = std::fs::read_to_string(schema_dir().join(schema_file)).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&schema_text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn tables_json_validates_against_schema() {
    let out = bin().args(["tables", "--format", "json"]).output().unwrap();
    assert!(out.status.success());
    let value = stdout_json(&out);
    validate("tables.schema.json", &value);
    // the documented example row is present
    let rows = value["syndrome_rows"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().any(|r| {
        r["syndrome"] == serde_json::json!([1, -1, -1, -1])
            && r["no_flag"] == "Z4"
            && r["with_flag"] == "Y3Y5"
    }));
}

#[test]
fn tables_csv_has_the_documented_shape() {
    let out = bin().args(["tables", "--format", "csv"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[+1 -1 -1 -1],noflag,Z4"));
    assert!(text.contains("[+1 -1 -1 -1],withflag,Y3Y5"));
    let noflag_rows = text.lines().filter(|l| l.contains(",noflag,")).count();
    let withflag_rows = text.lines().filter(|l| l.contains(",withflag,")).count();
    assert_eq!(noflag_rows, 16);
    assert_eq!(withflag_rows, 16);
}

#[test]
fn verify_exit_codes_and_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("reports.json");
    let out = bin()
        .args(["verify", "--which", "tables", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    assert!(out.status.success());
    let reports: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    // the tables report uses its own schema; fault reports use verify_report
    assert!(reports.as_array().unwrap().len() == 1);

    let out = bin()
        .args(["verify", "--which", "s1", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    assert!(out.status.success());
    let reports: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    for report in reports.as_array().unwrap() {
        validate("verify_report.schema.json", report);
    }

    // mutations must fail with exit code 1
    let out = bin()
        .args(["verify", "--which", "encoding", "--mutate", "non-ft"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args(["verify", "--which", "encoding", "--mutate", "drop-flag"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // usage errors exit with 2
    let out = bin()
        .args(["verify", "--which", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_monte_carlo_validates_and_is_seed_deterministic() {
    let args = [
        "simulate",
        "--protocol",
        "encoding",
        "--ft",
        "true",
        "--shots",
        "400",
        "--p2",
        "0.002",
        "--seed",
        "11",
    ];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    validate("experiment.schema.json", &stdout_json(&a));
}

#[test]
fn simulate_exact_reports_unit_fidelity() {
    let out = bin()
        .args([
            "simulate",
            "--protocol",
            "encoding",
            "--ft",
            "true",
            "--shots",
            "0",
            "--seed",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["mode"], "exact-dense");
    let f = v["report"]["f_l"].as_f64().unwrap();
    assert!((f - 1.0).abs() < 1e-9);
    let p0 = v["report"]["p0_minus"].as_f64().unwrap();
    assert!((p0 - 1.0).abs() < 1e-9);
}

#[test]
fn run_records_are_json_lines_matching_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("runs.jsonl");
    let out = bin()
        .args([
            "simulate",
            "--protocol",
            "encoding",
            "--ft",
            "true",
            "--shots",
            "25",
            "--seed",
            "5",
            "--records",
        ])
        .arg(&records)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&records).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 25);
    for line in lines {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        validate("run_record.schema.json", &value);
    }
}

#[test]
fn sweep_csv_and_json() {
    let out = bin()
        .args([
            "sweep",
            "--grid",
            "0.0005,0.001",
            "--shots",
            "200",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rate,f_l,stderr,acceptance,shots"));
    assert_eq!(lines.count(), 2);

    let out = bin()
        .args([
            "sweep", "--grid", "0.001", "--shots", "100", "--seed", "3", "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    validate("sweep.schema.json", &stdout_json(&out));
}

#[test]
fn ghz_noiseless_reports_unit_fidelity() {
    let out = bin().args(["ghz", "--seed", "2"]).output().unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn compile_round_trip_with_equivalence_check() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("circ.txt");
    std::fs::write(
        &src,
        "# name: demo\n# n: 3\n# roles: d1 d2 ancilla\n\
         prep 0 0\nprep 1 +\nprep 2 0\ngate H 2\ngate CX 2 0\ngate CY 2 1\ngate H 2\n\
         measure 2 parity\ncgate Z 0 if parity -1\n",
    )
    .unwrap();
    let compiled = dir.path().join("native.txt");
    let out = bin()
        .args(["compile", "--check", "--in"])
        .arg(&src)
        .arg("--out")
        .arg(&compiled)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("equivalence: pass"));
    let native = std::fs::read_to_string(&compiled).unwrap();
    assert!(native.contains("CRX-"));
    assert!(!native.contains("gate CX "));
    assert!(!native.contains("gate CY "));
    // the compiled file parses back and re-compiling it is rejected (it is
    // already native)
    let out = bin()
        .args(["compile", "--in"])
        .arg(&compiled)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_is_drawn_and_printed_when_omitted() {
    let out = bin()
        .args(["simulate", "--protocol", "s1", "--shots", "10"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("seed:"), "stderr: {err}");
}
