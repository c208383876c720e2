use std::process::Command;

use clap::Parser;
use ftpg::cli::{run, RunConfig, SCHEMA};
use serde_json::Value;

fn cfg(args: &[&str]) -> RunConfig {
    RunConfig::parse_from(std::iter::once("ftpg").chain(args.iter().copied()))
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["--cmd", "extend", "--q", "7", "--trials", "8", "--seed", "3"][..],
        &["--cmd", "oracle", "--trials", "2", "--seed", "3", "--format", "csv"][..],
        &["--cmd", "checkgeom", "--q", "2"][..],
    ] {
        let c = cfg(args);
        assert_eq!(run(&c).unwrap().render().unwrap(), run(&c).unwrap().render().unwrap());
    }
}

#[test]
fn trials_reproduce_in_isolation() {
    let short = run(&cfg(&["--cmd", "extend", "--trials", "3", "--seed", "5"])).unwrap();
    let long = run(&cfg(&["--cmd", "extend", "--trials", "6", "--seed", "5"])).unwrap();
    assert_eq!(short.records[..], long.records[..3]);
}

#[test]
fn json_schema_shape() {
    let r = run(&cfg(&["--cmd", "extend", "--q", "9", "--t", "2", "--trials", "10"])).unwrap();
    let v: Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    assert_eq!(v["config"]["cmd"], "extend");
    assert_eq!(v["summary"]["passed"], 10);
    assert_eq!(v["records"].as_array().unwrap().len(), 10);
    assert!(v["records"][0].get("elapsed_ms").is_none());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ftpg");
    let ok = Command::new(bin).args(["--cmd", "checkgeom", "--q", "2"]).output().unwrap();
    assert!(ok.status.success());
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["summary"]["failed"], 0);

    let bad = Command::new(bin).args(["--cmd", "extend", "--q", "5", "--t", "2"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("precondition violated"));

    let dir = std::env::temp_dir().join(format!("ftpg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("r.csv");
    let run = Command::new(bin)
        .args(["--cmd", "ffdemo", "--trials", "1", "--format", "csv", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(run.status.success());
    assert!(run.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().contains("ring_iso_recovered"));
    std::fs::remove_dir_all(&dir).unwrap();
}
