//! Runs the built `levycov` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn levycov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levycov")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = levycov(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn simulate_then_select_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "simulate",
        "--n",
        "400",
        "--seeds",
        "1",
        "--seed",
        "7",
        "--out",
        out,
        "--no-timestamp",
    ]);
    let input = dir.path().join("increments.csv");
    assert_eq!(header(&input), "dx1,dx2");
    assert_eq!(std::fs::read_to_string(&input).unwrap().lines().count(), 401);

    let stdout = ok(&[
        "select",
        "--input",
        input.to_str().unwrap(),
        "--method",
        "lepskii1",
        "--out",
        out,
    ]);
    assert!(stdout.starts_with("method = lepskii1"));
    for name in ["trace.csv", "summary.csv", "bound_curves.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn estimate_writes_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "estimate",
        "--n",
        "300",
        "--grid-points",
        "40",
        "--grid-log",
        "false",
        "--out",
        out,
        "--no-timestamp",
    ]);
    let cf = std::fs::read_to_string(dir.path().join("cf_curves.csv")).unwrap();
    assert_eq!(cf.lines().count(), 1 + 2 * 40);
    assert!(header(&dir.path().join("bound_curves.csv")).starts_with("U,"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "n = 300\nseeds = 3\ngrid_points = 50\n").unwrap();
    let out = dir.path().join("fig");
    let stdout = ok(&[
        "figure",
        "--config",
        config.to_str().unwrap(),
        "--n",
        "250",
        "--bigC",
        "2",
        "--A",
        "1.5",
        "--M",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(stdout.starts_with("n = 250:"), "{stdout}");
    let rows = std::fs::read_to_string(out.join("grid_rows.csv")).unwrap();
    assert!(rows.starts_with("# generated_at="));
    assert_eq!(rows.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3 * 50);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        ok(&[
            "oracle-start",
            "--n",
            "300",
            "--seeds",
            "3",
            "--grid-points",
            "60",
            "--out",
            out.to_str().unwrap(),
            "--no-timestamp",
        ]);
    }
    for name in ["grid_rows.csv", "aggregates.csv", "selections.csv"] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn properties_report_passes() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "properties",
        "--seeds",
        "5",
        "--grid-points",
        "80",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 5);
    assert!(dir.path().join("properties.csv").exists());
}

#[test]
fn bad_input_is_reported() {
    let out = levycov(&["select", "--method", "nope"]);
    assert!(!out.status.success());
    let out = levycov(&["select", "--input", "/nonexistent/x.csv", "--out", "/tmp"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/x.csv"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "unknown_key = 1\n").unwrap();
    let out = levycov(&["figure", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
