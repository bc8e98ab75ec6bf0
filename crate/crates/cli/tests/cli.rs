//! CLI contract tests: exit codes, determinism, file outputs, and the
//! corrupted-reference negative control.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_triorth"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn triorth")
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("triorth-cli-{name}"))
}

#[test]
fn construct_rejects_unsupported_r() {
    let out = run(&["construct", "--r", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("r = 4"), "explains the rejected regime: {msg}");
}

#[test]
fn construct_r16_reports_expected_parameters() {
    let dir = tmp("construct16");
    let out = bin()
        .args(["construct", "--r", "16", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report_r16.json")).unwrap())
            .unwrap();
    assert_eq!(report["n"], 240);
    assert_eq!(report["k"], 69);
    assert_eq!(report["distance"]["lower"], 172);
}

#[test]
fn construct_outputs_are_byte_deterministic() {
    let dir_a = tmp("det-a");
    let dir_b = tmp("det-b");
    for dir in [&dir_a, &dir_b] {
        let out = bin()
            .args(["construct", "--r", "8", "--out"])
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    for name in ["generator_r8.csv", "generator_r8.bin", "report_r8.json"] {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn quantum_rejects_invalid_k() {
    let out = run(&["quantum", "--r", "8", "--j", "0", "--k", "25"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("K"), "names the violated bound: {msg}");
}

#[test]
fn quantum_emits_stabilizers_for_reference_code() {
    let out = run(&[
        "quantum",
        "--r",
        "8",
        "--j",
        "0",
        "--k",
        "14",
        "--emit-stabilizers",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_phys"], "42");
    assert_eq!(v["d_lower"], "6");
    assert_eq!(v["css"]["n"], 42);
    assert_eq!(v["css"]["k"], 14);
    assert_eq!(v["css"]["x_stab"].as_array().unwrap().len(), 5);
    assert_eq!(v["css"]["z_stab"].as_array().unwrap().len(), 23);
}

#[test]
fn stabilizer_emission_rejected_beyond_level_zero() {
    let out = run(&[
        "quantum",
        "--r",
        "8",
        "--j",
        "1",
        "--k",
        "26",
        "--emit-stabilizers",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Without stabilizer emission the parameter query succeeds.
    let ok = run(&["quantum", "--r", "8", "--j", "1", "--k", "26"]);
    assert!(ok.status.success());
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["n_phys"], "422");
    assert_eq!(v["d_lower"], "22");
}

#[test]
fn table3_verification_passes_on_embedded_reference() {
    let out = run(&["quantum", "--table3", "--verify-table3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("774113521,266073871,12914929"));
    assert!(text.contains("table3 verified"));
}

#[test]
fn corrupted_reference_table_exits_four() {
    let mut reference: serde_json::Value =
        serde_json::from_str(triorth::tower::REFERENCE_TABLE_JSON).unwrap();
    reference["rows"][0]["d_lower"] = serde_json::json!(7);
    let path = tmp("corrupted.json");
    std::fs::write(&path, serde_json::to_string(&reference).unwrap()).unwrap();
    let out = bin()
        .args(["quantum", "--table3", "--verify-table3", "--fixture"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(
        msg.contains("d_lower") || msg.contains("D_min"),
        "lists cells: {msg}"
    );
}

#[test]
fn verify_all_is_byte_deterministic() {
    let a = run(&["verify-all", "--seed", "7"]);
    let b = run(&["verify-all", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reduce_sim_fixed_outcome_and_bad_input() {
    let out = run(&["reduce-sim", "--r", "4", "--outcomes", "1,2,3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 1);

    let bad = run(&["reduce-sim", "--r", "4", "--outcomes", "9,9,9"]);
    assert_eq!(bad.status.code(), Some(2));
    let huge = run(&["reduce-sim", "--r", "16", "--outcomes", "all"]);
    assert_eq!(huge.status.code(), Some(2));
}

#[test]
fn plan_emits_expected_route() {
    let out = run(&["plan", "--n", "5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["distill_dim"], "1024");
    assert_eq!(v["reduction_chain"].as_array().unwrap().len(), 1);
    assert_eq!(v["totals"]["measurements"], 3);
}
