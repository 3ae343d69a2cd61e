//! Exit-code contract of the binary: 0 on success, 2 on input errors.

use std::process::Command;

fn nbldpc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nbldpc"))
}

#[test]
fn gen_succeeds_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c2.code");
    let out = nbldpc()
        .args(["gen", "--n", "32", "--m", "16", "--dc", "4", "--dv", "2", "--q", "3"])
        .args(["--seed", "9", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("N=32") && stdout.contains("g=8") && stdout.contains("seed=9"));
    assert!(path.exists());
}

#[test]
fn infeasible_degrees_exit_2() {
    let out = nbldpc()
        .args(["gen", "--n", "16", "--m", "8", "--dc", "4", "--dv", "3", "--q", "2"])
        .args(["--out", "/tmp/never_written.code"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn usage_errors_exit_2() {
    let out = nbldpc().args(["simulate", "--frames", "not-a-number"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_code_file_exit_2() {
    let out = nbldpc()
        .args(["simulate", "--code", "/tmp/no_such_file.code", "--noiseless", "--frames", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.code");
    let b = dir.path().join("b.code");
    for (path, seed) in [(&a, "123"), (&b, "123")] {
        let out = nbldpc()
            .env("NBLDPC_SEED", seed)
            .args(["gen", "--n", "16", "--m", "8", "--dc", "4", "--dv", "2", "--q", "2"])
            .args(["--out", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
