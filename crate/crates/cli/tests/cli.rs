//! End-to-end runs of the command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use bianchi_cli::{exit, run, RegionConfig, RunConfig, ScheduleConfig, ScheduleParams};
use tempfile::TempDir;

fn bianchi(args: &[&str]) -> i32 {
    run(std::iter::once("bianchi").chain(args.iter().copied()))
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

const THEOREM3: &str = r#"{
  "field": -3,
  "regions": [{"id": "A", "x1": [0.0, 0.25], "x2": [0.0, 0.25], "y": [1.0, 1.5]}],
  "schedule": {"kind": "constant_sigma", "params": {"sigma_inf": 1.5}, "t_grid": [5.0, 10.0]}
}"#;

#[test]
fn config_round_trips() {
    let full = RunConfig {
        field: -7,
        subcommand: Some("sweep".into()),
        regions: vec![RegionConfig {
            id: "low".into(),
            x1: (0.0, 0.1),
            x2: (-0.1, 0.1),
            y: (1.1, 1.7),
            nodes: Some([4, 5, 6]),
        }],
        schedule: Some(ScheduleConfig {
            kind: "approach_one".into(),
            params: ScheduleParams {
                sigma_inf: None,
                rate: Some(0.7),
            },
            t_grid: vec![5.0, 10.0, 20.0, 40.0],
        }),
        eps: 1e-9,
        nodes: [6, 6, 8],
        zeros: Some(5),
        test_function: Some("bump23".into()),
        output: Some("out/run.csv".into()),
        threads: Some(1),
    };
    let back: RunConfig = serde_json::from_str(&full.to_json()).unwrap();
    assert_eq!(back, full);

    // defaults are filled in and survive a second trip
    let minimal: RunConfig = serde_json::from_str(THEOREM3).unwrap();
    assert_eq!(minimal.nodes, [6, 6, 8]);
    let again: RunConfig = serde_json::from_str(&minimal.to_json()).unwrap();
    assert_eq!(again, minimal);
}

#[test]
fn unknown_flag_is_a_usage_error_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", THEOREM3);
    let out = dir.path().to_str().unwrap();
    let code = bianchi(&["--output-dir", out, "sweep", "--theorem", "3", "--config", cfg.to_str().unwrap(), "--bogus"]);
    assert_eq!(code, exit::USAGE);
    assert_eq!(bianchi(&["sweep", "--theorem", "4", "--config", cfg.to_str().unwrap()]), exit::USAGE);
    assert_eq!(bianchi(&["frobnicate"]), exit::USAGE);
    assert_eq!(files_in(dir.path()), ["c.json"]);
}

#[test]
fn malformed_configs_are_usage_errors_and_write_nothing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad = [
        ("truncated", r#"{"field": -1, "schedule": "#),
        ("unknown_key", r#"{"field": -1, "colour": "red", "schedule": {"kind": "constant_sigma", "params": {"sigma_inf": 1.5}, "t_grid": [5.0]}}"#),
        ("bad_field", r#"{"field": -5, "schedule": {"kind": "constant_sigma", "params": {"sigma_inf": 1.5}, "t_grid": [5.0]}}"#),
        ("bad_kind", r#"{"field": -1, "schedule": {"kind": "wiggle", "t_grid": [5.0]}}"#),
        ("missing_param", r#"{"field": -1, "schedule": {"kind": "approach_one", "t_grid": [5.0, 10.0]}}"#),
        ("unsorted_grid", r#"{"field": -1, "schedule": {"kind": "constant_sigma", "params": {"sigma_inf": 1.5}, "t_grid": [10.0, 5.0]}}"#),
        ("bad_eps", r#"{"field": -1, "eps": 0.5, "schedule": {"kind": "constant_sigma", "params": {"sigma_inf": 1.5}, "t_grid": [5.0]}}"#),
        ("wrong_subcommand", r#"{"field": -1, "subcommand": "lemma-cont", "schedule": {"kind": "constant_sigma", "params": {"sigma_inf": 1.5}, "t_grid": [5.0]}}"#),
        ("outside_domain", r#"{"field": -1, "regions": [{"id": "A", "x1": [0.0, 0.25], "x2": [0.0, 0.25], "y": [0.2, 0.5]}], "schedule": {"kind": "constant_sigma", "params": {"sigma_inf": 1.5}, "t_grid": [5.0]}}"#),
        ("wrong_schedule", r#"{"field": -1, "schedule": {"kind": "approach_one", "params": {"rate": 1.0}, "t_grid": [5.0, 10.0]}}"#),
    ];
    for (name, json) in bad {
        let cfg = write_config(dir.path(), &format!("{name}.json"), json);
        let code = bianchi(&["--output-dir", out, "sweep", "--theorem", "3", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, exit::USAGE, "{name}");
    }
    let missing = dir.path().join("absent.json");
    assert_eq!(bianchi(&["lemma-cont", "--config", missing.to_str().unwrap()]), exit::USAGE);
    assert!(files_in(dir.path()).iter().all(|f| !f.ends_with(".csv")));
}

#[test]
fn volume_matches_closed_form() {
    assert_eq!(bianchi(&["volume", "--field", "-1"]), exit::OK);
    assert_eq!(bianchi(&["volume", "--field", "-163"]), exit::OK);
    assert_eq!(bianchi(&["volume", "--field", "-5"]), exit::USAGE);
}

#[test]
fn eval_agrees_with_oracle() {
    assert_eq!(bianchi(&["eval", "--field", "-3", "--sigma", "3", "--t", "-1", "--point", "-0.1,0.2,1.1", "--oracle"]), exit::OK);
    assert_eq!(bianchi(&["eval", "--field", "-1", "--sigma", "1.5", "--t", "20", "--point", "0.1,0.1,1"]), exit::OK);
    // the coset sum diverges at σ ≤ 2
    assert_eq!(bianchi(&["eval", "--field", "-1", "--sigma", "1.5", "--t", "2", "--point", "0,0,1", "--oracle"]), exit::USAGE);
    assert_eq!(bianchi(&["eval", "--field", "-1", "--sigma", "3", "--t", "0", "--point", "0,0,-1"]), exit::USAGE);
}

#[test]
fn zeros_and_selftest_pass() {
    assert_eq!(bianchi(&["zeros", "--field", "-7", "--tmax", "20"]), exit::OK);
    assert_eq!(bianchi(&["zeros", "--field", "-7", "--tmax", "500"]), exit::USAGE);
    assert_eq!(bianchi(&["selftest", "--field", "-1"]), exit::OK);
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", THEOREM3);
    let mut csvs = Vec::new();
    for name in ["first.csv", "second.csv"] {
        let out = dir.path().join(name);
        let code = bianchi(&[
            "--threads", "1", "sweep", "--theorem", "3", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(),
        ]);
        // Q(√−3) is still 22% off at t = 10, above the 10% tolerance
        assert_eq!(code, exit::ASSERTION_FAILED);
        csvs.push(fs::read(&out).unwrap());
        let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.with_extension("json")).unwrap()).unwrap();
        assert_eq!(summary["config"]["field"], -3);
        assert_eq!(summary["assertions"][0]["passed"], false);
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.pop().unwrap()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "field,t,sigma_t,region,mu_st,predicted,ratio,quad_delta,trunc_eps,hypothesis,inconclusive"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("-3,5.0,1.5,A,"));
    assert!(rows[1].starts_with("-3,5.0,1.5,A:reweighted,"));
}

/// Runs the built binary so the environment variable reaches only the child.
#[test]
fn lemma_writes_to_env_output_dir() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "lemma.json",
        r#"{"field": -1, "subcommand": "lemma-cont", "test_function": "bump23",
            "schedule": {"kind": "constant_sigma", "params": {"sigma_inf": 1.5}, "t_grid": [10.0, 20.0, 40.0]}}"#,
    );
    let out_dir = dir.path().join("results");
    let status = Command::new(env!("CARGO_BIN_EXE_bianchi"))
        .args(["lemma-cont", "--config", cfg.to_str().unwrap()])
        .env("BIANCHI_OUTPUT_DIR", &out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(exit::OK));
    assert_eq!(files_in(&out_dir), ["lemma_cont_D-1.csv", "lemma_cont_D-1.json"]);
    let mut reader = csv::Reader::from_path(out_dir.join("lemma_cont_D-1.csv")).unwrap();
    let ratios: Vec<f64> = reader
        .records()
        .map(|r| r.unwrap()[6].parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 3);
    assert!((ratios[2] - 1.0).abs() < 0.1, "{ratios:?}");
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let back: RunConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        n += 1;
    }
    assert_eq!(n, 5);
}
