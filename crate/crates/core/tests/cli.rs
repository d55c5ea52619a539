use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ssrlab"))
        .args(args)
        .env_remove("SSRLAB_SEED")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(cmd: &str, file: &str) -> (i32, Value) {
    let (code, out) = run(&[cmd, "--input", &data(file), "--format", "json"]);
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn analyze_reports_sectors_and_dirac() {
    let (code, v) = json("analyze", "analyze_blocks.json");
    assert_eq!(code, 0);
    let r = &v["result"];
    assert_eq!(r["algebra_dim"], 5);
    assert_eq!(r["commutant_dim"], 2);
    assert_eq!(r["has_ssr"], true);
    assert_eq!(r["abelian_ssr"], true);
    assert_eq!(r["sectors"]["count"], 2);
    assert_eq!(r["sectors"]["dims"], serde_json::json!([2, 1]));

    let (code, text) = run(&["analyze", "--input", &data("analyze_ampliation.json")]);
    assert_eq!(code, 0);
    assert!(text.contains("abelian: no"));
    assert!(text.contains("warning:"));
}

#[test]
fn reduce_flags_coherences() {
    let (code, v) = json("reduce", "reduce_mixed.json");
    assert_eq!(code, 0);
    assert_eq!(v["result"]["purity_class"], "mixed_across_sectors");
    let (code, v) = json("reduce", "reduce_coherent.json");
    assert_eq!(code, 1);
    assert_eq!(v["status"], "FAIL");
    assert_eq!(v["result"]["purity_class"], "coherent_violation");
}

#[test]
fn way_check_accepts_commuting_and_rejects_obstructed() {
    let (code, v) = json("way-check", "way_sigma_z.json");
    assert_eq!(code, 0);
    assert_eq!(v["status"], "PASS");
    let (code, text) = run(&["way-check", "--input", &data("way_sigma_x.json")]);
    assert_eq!(code, 1);
    assert!(text.contains("||[P, Q_S]||_HS = 2.8284271247461903"));
}

#[test]
fn ray_rep_catalog_and_direct_sum() {
    let (code, text) = run(&["ray-rep", "--input", &data("rayrep_klein_pauli.json")]);
    assert_eq!(code, 0);
    assert!(text.contains("trivial: NO"));
    let (code, text) = run(&["ray-rep", "--input", &data("rayrep_direct_sum.json")]);
    assert_eq!(code, 0);
    assert!(text.contains("direct sum: obstructed"));
    let (code, text) = run(&["ray-rep", "--input", &data("rayrep_table.json")]);
    assert_eq!(code, 0);
    assert!(text.contains("similar to comparison multiplier: YES"));
}

#[test]
fn channel_checks() {
    let (code, v) = json("channel", "channel_dephasing.json");
    assert_eq!(code, 0);
    assert_eq!(v["status"], "PASS");
    let (code, _) = json("channel", "channel_transpose.json");
    assert_eq!(code, 1);
}

#[test]
fn output_file_matches_stdout() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let target = dir.join("cli-output.json");
    let input = data("analyze_blocks.json");
    let (_, stdout) = run(&["analyze", "--input", &input, "--format", "json"]);
    let (code, empty) = run(&["analyze", "--input", &input, "--format", "json", "--output", target.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(empty.is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap(), stdout);
}

#[test]
fn header_echoes_seed_tol_and_digest() {
    let (_, text) = run(&["demo", "way", "--seed", "5", "--tol", "1e-9"]);
    assert!(text.starts_with("ssrlab "));
    assert!(text.contains("\nseed: 5\n"));
    assert!(text.contains("\ntol: 1e-9\n"));
    let (_, v) = json("analyze", "analyze_blocks.json");
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["analyze"]).0, 2);
    assert_eq!(run(&["analyze", "--input", &data("analyze_blocks.json"), "--format", "xml"]).0, 2);
}
