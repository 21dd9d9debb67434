use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assouad-lab"))
        .env_remove("ASSOUAD_LAB_THREADS")
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "structured"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn every_subcommand_honours_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let tel = dir.path().join("tel.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["validate", "--in", "cantor3"],
        vec!["ghdist", "--a", "cantor2", "--b", "progression5", "--approximation"],
        vec!["dim", "--in", "progression64", "--method", "lower"],
        vec!["cover", "--in", "grid4", "--r", "1", "--mode", "exact"],
        vec!["cover", "--in", "cantor3", "--doubling"],
        vec!["cover", "--in", "cantor3", "--r", "0.1", "--separated"],
        vec!["telescope", "--component", "cantor2", "--component", "grid2", "--rescale", "--out", tel.to_str().unwrap()],
        vec!["asymcone", "--truncation", "5"],
        vec!["experiment", "--scenario", "lemmas"],
        vec!["embed", "--in", "progression3"],
    ];
    for args in cases {
        let table = run(&args);
        assert!(table.status.success(), "{args:?}: {}", String::from_utf8_lossy(&table.stderr));
        let text = stdout(&table);
        assert!(text.lines().all(|l| l.contains('\t')), "{args:?} table:\n{text}");
        json(&args);
    }
    assert!(tel.exists());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["dim", "--in", "cantor3", "--method", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["cover", "--in", "cantor3"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--in", "no/such/file.json"]).status.code(), Some(3));
    assert_eq!(run(&["cover", "--in", "grid12", "--r", "1", "--mode", "exact"]).status.code(), Some(3));
    assert_eq!(run(&["ghdist", "--a", "cantor4", "--b", "cantor4", "--mode", "exact"]).status.code(), Some(3));
    let out = run(&["experiment", "--scenario", "cantor", "--convergence-tol", "1e-9", "--burn-in", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("false"));
}

#[test]
fn triangle_violation_names_the_triple() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.json");
    fs::write(&p, r#"{"d": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}"#).unwrap();
    let out = run(&["validate", "--in", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("triangle"), "{err}");
}

#[test]
fn generated_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["c.json", "c.csv"] {
        let p = dir.path().join(name);
        assert!(run(&["generate", "cantor:4", "--out", p.to_str().unwrap()]).status.success());
        let v = json(&["ghdist", "--a", p.to_str().unwrap(), "--b", "cantor4", "--mode", "bounds"]);
        assert_eq!(v["upper"].as_f64(), Some(0.0));
    }
    let printed: Value = serde_json::from_slice(&run(&["generate", "progression:3"]).stdout).unwrap();
    assert_eq!(printed["d"][0][2].as_f64(), Some(2.0));
}

#[test]
fn config_files_replace_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let toml = dir.path().join("run.toml");
    fs::write(&toml, "command = \"dim\"\nin = \"progression64\"\nmethod = \"covering\"\n").unwrap();
    let direct = run(&["--format", "structured", "dim", "--in", "progression64", "--method", "covering"]);
    let via = run(&["--format", "structured", "--config", toml.to_str().unwrap()]);
    assert!(via.status.success());
    assert_eq!(direct.stdout, via.stdout);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"command": "validate", "in": "missing.csv"}"#).unwrap();
    assert_eq!(run(&["--config", bad.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["--format", "structured", "dim", "--in", "cantor7", "--method", "covering"];
    let one = Command::new(env!("CARGO_BIN_EXE_assouad-lab")).env("ASSOUAD_LAB_THREADS", "1").args(args).output().unwrap();
    let flag = run(&["--threads", "3", "--format", "structured", "dim", "--in", "cantor7", "--method", "covering"]);
    assert!(one.status.success() && flag.status.success());
    assert_eq!(one.stdout, flag.stdout);
    assert_eq!(run(&["--threads", "0", "validate", "--in", "cantor2"]).status.code(), Some(2));
}

#[test]
fn output_dir_receives_both_renderings() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--output-dir", dir.path().to_str().unwrap(), "validate", "--in", "grid3"]);
    assert!(out.status.success());
    let tsv = fs::read_to_string(dir.path().join("validate.tsv")).unwrap();
    assert_eq!(tsv, stdout(&out));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("validate.json")).unwrap()).unwrap();
    assert_eq!(v["n"], 9);
}

#[test]
fn timing_is_opt_in() {
    let plain = json(&["experiment", "--scenario", "lemmas"]);
    assert!(plain["reports"][0]["runtime_seconds"].is_null());
    let timed = json(&["--timing", "experiment", "--scenario", "lemmas"]);
    assert!(timed["reports"][0]["runtime_seconds"].is_number());
}

#[test]
fn tables_use_twelve_significant_digits() {
    let out = stdout(&run(&["validate", "--in", "cantor4"]));
    let sep = out.lines().find(|l| l.starts_with("separation")).unwrap();
    assert_eq!(sep, "separation\t0.0123456790123");
}
