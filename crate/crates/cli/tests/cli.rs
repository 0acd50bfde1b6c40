//! End-to-end checks of the installed binary: exit codes, file outputs,
//! and the verification gate.

use std::process::Command;

fn loctime() -> Command {
    Command::new(env!("CARGO_BIN_EXE_loctime"))
}

#[test]
fn missing_command_is_a_usage_error() {
    let out = loctime().output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing command"));
    assert!(stderr.contains("USAGE"));
}

#[test]
fn unknown_flag_is_a_usage_error_naming_the_flag() {
    let out = loctime().args(["clt", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
}

#[test]
fn misaligned_lag_exits_with_usage_error() {
    let out = loctime()
        .args(["clt", "--h", "0.03", "--bin", "0.02"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_prints_usage_and_succeeds() {
    let out = loctime().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("COMMANDS"));
}

#[test]
fn verify_identities_gate_passes() {
    let out = loctime().arg("verify-identities").output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("8/8 identity checks passed"), "{stdout}");
    assert!(!stdout.contains("FAIL"), "{stdout}");
}

#[test]
fn clt_run_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = loctime()
        .args([
            "clt",
            "--paths",
            "8",
            "--dt",
            "1e-2",
            "--h",
            "0.2,0.1",
            "--seed",
            "5",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    assert!(csv.starts_with("path_id,h,q,r,s_q,r_qh,t_q,limit_scale,limit_sample\n"));
    assert_eq!(csv.lines().count(), 1 + 8 * 2);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["config"]["n_paths"], 8);
    assert_eq!(summary["master_seed"], 5);
    assert!(summary["config"].get("workers").is_none());
}

#[test]
fn worker_env_does_not_change_output() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let common = [
        "clt", "--paths", "6", "--dt", "1e-2", "--h", "0.1", "--seed", "2", "--out",
    ];
    let out1 = loctime()
        .args(common)
        .arg(dir1.path())
        .env("LOCTIME_WORKERS", "1")
        .output()
        .unwrap();
    let out2 = loctime()
        .args(common)
        .arg(dir2.path())
        .env("LOCTIME_WORKERS", "8")
        .output()
        .unwrap();
    assert_eq!(out1.status.code(), Some(0));
    assert_eq!(out2.status.code(), Some(0));
    let read = |d: &tempfile::TempDir, f: &str| std::fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&dir1, "samples.csv"), read(&dir2, "samples.csv"));
    assert_eq!(read(&dir1, "summary.json"), read(&dir2, "summary.json"));
}
