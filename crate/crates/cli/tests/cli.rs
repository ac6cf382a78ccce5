use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn mmv(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmv"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn cfg(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn missing_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmv(&["solve"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("status=config_error"));
    let o = mmv(&["solve", "--config", "/nonexistent.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_schema_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[model]\nmu = 0.1\nsigma = 0.2\nr = 0.04\n").unwrap();
    let o = mmv(&["solve", "--config", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema_version"));
}

#[test]
fn single_path_is_insufficient() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmv(&["verify", "--config", &cfg("zero_premium.toml"), "--paths", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn table1_writes_all_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmv(&["table1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_sha256="));
    assert_eq!(lines.next().unwrap(), "ticker,zeta_gamma,pass");
    assert_eq!(lines.count(), 23);
    assert!(stdout(&o).contains("min_ticker=GM"));
}

#[test]
fn table1_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(&path, "ticker,drift,sigma,nu,gamma\nXYZ,0.1,abc,1,0.1\n").unwrap();
    let o = mmv(&["table1", "--input", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn violating_model_fails_the_assumption() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmv(&["check-assumption", "--config", &cfg("violating.toml")], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("regime=MMV!=MV"));
}

#[test]
fn solve_dump_has_every_node() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmv(&["solve", "--config", &cfg("zero_premium.toml"), "--dump"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(dir.path().join("pde_solution.csv")).unwrap();
    let mut lines = text.lines();
    lines.next();
    assert_eq!(lines.next().unwrap(), "z,t,F,G,H,G_z");
    assert_eq!(lines.count(), 401 * 1001);
}

#[test]
fn frontier_respects_theta_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmv(&["frontier", "--config", &cfg("constant.toml"), "--theta", "0.25,4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("frontier.csv")).unwrap();
    let rows: Vec<_> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("2.5000000000000000e-1,"));
}

#[test]
fn figure1_rows_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = mmv(&["figure1", "--config", &cfg("constant.toml")], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("figure1.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "x_now,pi_levy,pi_brownian");
    assert_eq!(text.lines().count(), 2 + 31);
}

#[test]
fn verify_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "--config",
        &cfg("constant.toml"),
        "--paths",
        "2000",
        "--dt",
        "0.01",
        "--seed",
        "9",
        "--trajectories",
        "500",
    ];
    let oa = mmv(&args, a.path());
    let ob = mmv(&args, b.path());
    assert_eq!(stdout(&oa).replace(a.path().to_str().unwrap(), ""), stdout(&ob).replace(b.path().to_str().unwrap(), ""));
    for name in ["verify_report.csv", "paths.csv", "trajectories.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let traj = std::fs::read_to_string(a.path().join("trajectories.csv")).unwrap();
    assert!(traj.starts_with("# config_sha256="));
    assert!(traj.lines().next().unwrap().ends_with("seed=9"));
    // capped at 100 paths, 101 points each
    assert_eq!(traj.lines().count(), 2 + 100 * 101);
    let paths = std::fs::read_to_string(a.path().join("paths.csv")).unwrap();
    assert_eq!(paths.lines().count(), 2 + 2000);
}

#[test]
fn seed_changes_the_sample() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let base = ["verify", "--config", &cfg("zero_premium.toml"), "--paths", "200"];
    let oa = mmv(&[&base[..], &["--seed", "1"]].concat(), a.path());
    let ob = mmv(&[&base[..], &["--seed", "2"]].concat(), b.path());
    assert_eq!(oa.status.code(), Some(0), "{}", stdout(&oa));
    assert_eq!(ob.status.code(), Some(0), "{}", stdout(&ob));
    let x = std::fs::read_to_string(a.path().join("paths.csv")).unwrap();
    let y = std::fs::read_to_string(b.path().join("paths.csv")).unwrap();
    assert_ne!(x, y);
}
