use std::process::Command as Process;

use igusa_cli::suites::fiber::{table_dump, FiberDetails};
use igusa_cli::{run, CliError, Command, RunConfig, SCHEMA};

fn empty() -> RunConfig {
    RunConfig { pairs: vec![], curves: vec![], towers: vec![], fibers: vec![], ..RunConfig::default() }
}

fn small() -> RunConfig {
    RunConfig::from_json(
        r#"{
            "pairs": [],
            "samples": 5,
            "curves": [{"kind": "elliptic", "p": 5, "a": [0, 0, 0, 1, 1], "gamma": 1}],
            "towers": [{"p": 3, "r_max": 2, "d": 1, "count": 2}],
            "fibers": [{"kind": "table", "p": 5, "r": 2}, {"kind": "synthetic", "p": 3, "r": 2, "ordinary": 1}]
        }"#,
    )
    .unwrap()
}

#[test]
fn empty_pair_list_gives_empty_report() {
    let rep = run(Command::VerifyIdentity, &empty(), false);
    assert!(rep.results.is_empty());
    assert!(rep.passed);
    assert_eq!(rep.schema, SCHEMA);
    for cmd in [Command::Cartier, Command::Tower, Command::Fiber, Command::All] {
        assert!(run(cmd, &empty(), false).results.is_empty());
    }
}

#[test]
fn invalid_pair_is_rejected_at_parse_time() {
    let err = RunConfig::from_json(r#"{"pairs": [[5, 5]]}"#).unwrap_err();
    assert!(matches!(err, CliError::Config(ref m) if m.contains("divide")));
}

#[test]
fn identical_seeds_give_identical_reports() {
    let cfg = small();
    let a = run(Command::All, &cfg, false).to_json();
    let b = run(Command::All, &cfg, false).to_json();
    assert_eq!(a, b);
    let mut other = cfg.clone();
    other.seed = 17;
    let c = run(Command::All, &other, false);
    assert!(c.passed);
    assert_ne!(a, c.to_json());
}

#[test]
fn small_config_passes() {
    let rep = run(Command::All, &small(), false);
    assert!(rep.passed, "{}", rep.to_json());
    assert_eq!(rep.summary.cases, 4);
}

#[test]
fn table_dump_lists_six_components() {
    let t = table_dump(5, 2).unwrap();
    assert_eq!(t.components.len(), 6);
    assert_eq!(t.factorizations_hold, Some(true));
    let rep = run(Command::Fiber, &small(), false);
    assert_eq!(rep.results[0].details["components"].as_array().unwrap().len(), 6);
    assert!(matches!(serde_json::to_value(FiberDetails::Table(t)).unwrap()["p"].as_u64(), Some(5)));
}

#[test]
fn single_level_tower_is_plain_linear_algebra() {
    let cfg = RunConfig::from_json(r#"{"pairs": [], "curves": [], "fibers": [], "towers": [{"p": 5, "r_max": 1, "d": 3}]}"#)
        .unwrap();
    let rep = run(Command::Tower, &cfg, false);
    assert!(rep.passed, "{}", rep.to_json());
    assert_eq!(rep.results[0].details["incompatible_pairing_rejected"], serde_json::Value::Null);
}

#[test]
fn binary_exit_status_and_output() {
    let dir = std::env::temp_dir().join(format!("igusa-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, serde_json::to_string(&small()).unwrap()).unwrap();
    let out = dir.join("report.json");
    let status = Process::new(env!("CARGO_BIN_EXE_igusa"))
        .args(["fiber", "--jobs", "2", "--seed", "3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema"], SCHEMA);
    assert_eq!(report["seed"], 3);

    // A failing case makes the exit status nonzero.
    let failing = dir.join("failing.json");
    std::fs::write(&failing, r#"{"curves": [{"kind": "elliptic", "p": 5, "a": [0, 0, 0, 1, 1], "gamma": 0}], "samples": 1}"#)
        .unwrap();
    let status = Process::new(env!("CARGO_BIN_EXE_igusa"))
        .args(["cartier", "--config"])
        .arg(&failing)
        .arg("--out")
        .arg(dir.join("failing-report.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"pairs": [[5, 5]]}"#).unwrap();
    let status = Process::new(env!("CARGO_BIN_EXE_igusa")).args(["all", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
