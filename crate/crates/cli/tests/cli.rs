use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn va(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_va")).current_dir(fixtures()).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn expand_delta3() {
    let o = va(&["expand", "delta3(x0;x1,x2)", "--window", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("x0^(-1)"), "{text}");
    assert!(text.contains("x1^(-1)"), "{text}");
}

#[test]
fn residue_subcommand() {
    let o = va(&["res", "x2^-1 * delta((x1-x0)/x2)", "x2", "--window", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn syntax_error_is_a_usage_error() {
    let o = va(&["expand", "delta((x1-x2)/x0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("column 17") && err.contains("')'"), "{err}");
}

#[test]
fn check_lower_bounded_algebra_passes() {
    let o = va(&["check", "poly_mobius_lb.json", "--max-wt", "8", "--report", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["passed"], true);
    assert!(r["witnesses"].as_array().unwrap().is_empty());
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "jacobi"));
}

#[test]
fn json_reports_are_byte_identical() {
    let args = ["check", "two_dim.json", "--report", "json"];
    assert_eq!(va(&args).stdout, va(&args).stdout);
    let args = ["duality", "lb_adjoint.json", "--args", "t^5*", "t", "t", "t", "--window", "8", "--report", "json"];
    assert_eq!(va(&args).stdout, va(&args).stdout);
}

#[test]
fn broken_jacobi_exits_one_with_witness() {
    let o = va(&["check", "broken_jacobi.json"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL jacobi") && text.contains("inputs:"), "{text}");
}

#[test]
fn poly_fails_strong_grading() {
    let o = va(&["check", "poly.json", "--max-wt", "4", "--window", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL weight_lower_bound"));
}

#[test]
fn missing_file_and_bad_flags_exit_two() {
    assert_eq!(va(&["check", "no_such_file.json"]).status.code(), Some(2));
    assert_eq!(va(&["check", "poly.json", "--report", "xml"]).status.code(), Some(2));
    assert_eq!(va(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(va(&["check", "bad_vacuum.json"]).status.code(), Some(2));
}

#[test]
fn contragredient_writes_a_loadable_module() {
    let dir = std::env::temp_dir().join(format!("va-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("jordan_dual.json");
    let o = va(&["contragredient", "jordan_toy.json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = va(&["ingest", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dimension 2"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn duality_and_pz_subcommands() {
    let o = va(&["duality", "lb_adjoint.json", "--args", "t*", "t", "t", "t", "--window", "10", "--report", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["checks"].as_array().unwrap().len(), 5);
    let o = va(&["duality", "lb_adjoint.json", "--pz", "1/2", "--args", "t", "t", "t", "--window", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS pz_jacobi"));
    let o = va(&["duality", "lb_adjoint.json", "--args", "nope", "t", "t", "t"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lie_subcommands() {
    let o = va(&["lie", "tensor", "sl2_doublets.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("spin 0 x1, spin 1 x1"));
    for action in ["assoc", "contragredient", "intertwine"] {
        assert_eq!(va(&["lie", action, "sl2_doublets.json"]).status.code(), Some(0), "{action}");
    }
    assert_eq!(va(&["lie", "intertwine", "bad_lie_map.json"]).status.code(), Some(1));
    assert_eq!(va(&["lie", "tensor", "poly.json"]).status.code(), Some(2));
}

#[test]
fn ingest_normalizes_and_checks() {
    let dir = std::env::temp_dir().join(format!("va-cli-ingest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("two_dim.json");
    let o = va(&["ingest", "two_dim.json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("plain kind, dimension 2"));
    let o = va(&["ingest", out.to_str().unwrap(), "--check"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn pairing_expansion_with_structure() {
    let o = va(&["expand", "<{t^5*}, Y({t}, x1) Y({t}, x2) {t}>", "--structure", "lb_adjoint.json", "--window", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "x1*x2 + x1^2 + x2^2");
}
