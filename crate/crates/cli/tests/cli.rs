use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(f: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(f)
}

fn eorder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eorder"))
        .args(args)
        .env_remove("ETHRACER_MAX_LEN")
        .output()
        .unwrap()
}

fn analyze(name: &str, extra: &[&str], report: Option<&std::path::Path>) -> Output {
    let c = corpus(&format!("{name}.fsol"));
    let s = corpus(&format!("{name}.scenario.json"));
    let mut args = vec!["analyze", c.to_str().unwrap(), "--scenario", s.to_str().unwrap()];
    args.extend_from_slice(extra);
    if let Some(r) = report {
        args.push("--report");
        args.push(r.to_str().unwrap());
    }
    eorder(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn iou_flags_one_minimized_witness() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("iou.json");
    let o = analyze("iou", &[], Some(&report));
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("1 minimized"));
    let v = eorder(&["verify", report.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn empty_is_clean() {
    assert_eq!(analyze("empty", &[], None).status.code(), Some(0));
}

#[test]
fn casino_lin_mode() {
    let o = analyze("casino", &["--mode", "lin"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("lin: 1 violations"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    analyze("contest", &["--seed", "5"], Some(&a));
    analyze("contest", &["--seed", "5", "--jobs", "1"], Some(&b));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn tampered_report_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    analyze("escrow", &[], Some(&report));
    let mut j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    j["sync"]["minimized"][0]["output_b"]["sha256"] = serde_json::json!("0".repeat(64));
    std::fs::write(&report, serde_json::to_string(&j).unwrap()).unwrap();
    let v = eorder(&["verify", report.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(2));
    assert!(stdout(&v).contains("minimized witness 0"));
}

#[test]
fn env_override_sets_max_len() {
    let c = corpus("iou.fsol");
    let s = corpus("iou.scenario.json");
    let o = Command::new(env!("CARGO_BIN_EXE_eorder"))
        .args(["analyze", c.to_str().unwrap(), "--scenario", s.to_str().unwrap()])
        .env("ETHRACER_MAX_LEN", "2")
        .output()
        .unwrap();
    // no two-event witness exists for the token
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 minimized"));
}

#[test]
fn dump_rwsets_needs_no_scenario() {
    let c = corpus("iou.fsol");
    let o = eorder(&["analyze", c.to_str().unwrap(), "--dump-rwsets"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j[1]["name"], "approve");
    assert_eq!(j[1]["writes"], serde_json::json!(["allowed"]));
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(eorder(&["analyze"]).status.code(), Some(1));
    assert_eq!(eorder(&["frobnicate"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fsol");
    std::fs::write(&bad, "contract C {\n  function f() { x = ; }\n}\n").unwrap();
    let o = eorder(&[
        "analyze",
        bad.to_str().unwrap(),
        "--scenario",
        corpus("empty.scenario.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.fsol:2:"), "{err}");
}

#[test]
fn help_exits_zero() {
    assert_eq!(eorder(&["--help"]).status.code(), Some(0));
}
