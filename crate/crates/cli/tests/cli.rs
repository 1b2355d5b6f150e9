use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latticeflow")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    let out = dir.to_str().unwrap();
    all.extend(["--out", out]);
    run(&all)
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn velocity_table_and_overlays() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["velocity", "--alpha", "1", "--gamma", "1", "--delta", "1/4", "--ymax", "2", "--overlay"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(dir.path(), "velocity.csv"), "Y_lo,Y_hi,f\n0/1,5/8,0\n5/8,7/8,1\n7/8,13/8,2\n13/8,15/8,3\n15/8,2/1,4\n");
    let homogeneous = read(dir.path(), "velocity_homogeneous.csv");
    assert_eq!(homogeneous, "Y_lo,Y_hi,f\n0/1,1/2,0\n1/2,1/1,1\n1/1,3/2,2\n3/2,2/1,3\n");
    let svg = read(dir.path(), "velocity.svg");
    assert!(svg.contains("homogeneous") && svg.contains("high contrast"));
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "velocity.json")).unwrap();
    assert_eq!(json["breakpoints"], serde_json::json!(["5/8", "7/8", "13/8", "15/8"]));
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["evolve", "--delta", "0.25", "--l1", "1", "--epsilon", "1/20", "--horizon", "1/5", "--compare", "--eps", "1/10,1/20"];
    assert!(run_in(a.path(), &args).status.success());
    assert!(run_in(b.path(), &args).status.success());
    for name in ["discrete.csv", "discrete.json", "ode.csv", "ode.json", "evolve.svg", "convergence.csv", "convergence.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    assert_eq!(read(a.path(), "convergence.csv").lines().count(), 3);
}

#[test]
fn two_layer_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["velocity", "--deltas", "0.2,0.4", "--ymax", "2.6", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(read(dir.path(), "velocity.csv"), "Y_lo,Y_hi,f\n0/1,3/5,0\n3/5,9/10,1\n9/10,17/10,2\n17/10,9/5,3\n9/5,13/5,4\n");
    assert!(!dir.path().join("velocity.json").exists());
}

#[test]
fn pinning_curve() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["pinning", "--points", "8"]).status.success());
    let csv = read(dir.path(), "pinning.csv");
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0][..2], ["0/1", "2/1"]);
    assert_eq!(rows[2][..2], ["1/4", "8/5"]);
    for r in &rows[4..] {
        assert_eq!(r[1], "4/3");
    }
    let values: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn pinned_and_shrinking_evolutions() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &["evolve", "--delta", "1/4", "--l1", "2", "--epsilon", "1/10", "--horizon", "1"]).status.success());
    let discrete = read(dir.path(), "discrete.csv");
    assert!(discrete.lines().skip(1).all(|l| l.split(',').nth(1) == Some("2") && l.split(',').nth(2) == Some("2")));
    assert_eq!(read(dir.path(), "ode.csv").lines().next(), Some("t,L1,L2"));

    assert!(run_in(dir.path(), &["evolve", "--delta", "1/4", "--l1", "1", "--epsilon", "1/10", "--horizon", "1"]).status.success());
    assert_eq!(read(dir.path(), "ode.csv").lines().next(), Some("t,L1,L2,t_ext"));
}

#[test]
fn validation_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run_in(dir.path(), &["validate", "--suite", "parity"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = run_in(dir.path(), &["validate", "--suite", "velocity", "--seed", "5", "--inject-fault", "off-by-one"]);
    assert_eq!(bad.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "validation.json")).unwrap();
    let failures = report[0]["failures"].as_array().unwrap();
    assert!(!failures.is_empty() && failures.iter().all(|f| f["witness"].is_string()));
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");

    fs::write(&cfg, "command = velocity\n# comment\nwidth = 3\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("width"));

    fs::write(&cfg, "command = velocity\ngamma = 1\ngamma = 2\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));

    let out = run(&["velocity", "--alpha", "-1"]);
    assert_eq!(out.status.code(), Some(2));

    // a dumped config re-parses to the same run
    let dumped = run(&["evolve", "--deltas", "0.2,0.4", "--l1", "3/2", "--tie", "larger-step", "--dump-config"]);
    assert!(dumped.status.success());
    fs::write(&cfg, &dumped.stdout).unwrap();
    let again = run(&["--config", cfg.to_str().unwrap(), "--dump-config"]);
    assert_eq!(dumped.stdout, again.stdout);
    // flags override the file
    let overridden = run(&["--config", cfg.to_str().unwrap(), "--l1", "2", "--dump-config"]);
    assert!(String::from_utf8_lossy(&overridden.stdout).contains("l1 = 2\n"));
}
