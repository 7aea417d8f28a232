//! End-to-end checks of the compiled binary: flag handling, config merging,
//! formats, exit codes, and byte determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bdslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdslab"))
        .args(args)
        .env_remove("BDSLAB_OUTPUT_DIR")
        .output()
        .expect("binary should run")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

#[test]
fn analytic_reports_the_known_case() {
    let out = bdslab(&[
        "analytic",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--participation",
        "1.0",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.contains("84.0517 %"), "missing RER in:\n{text}");
    assert!(text.contains("tau 0.0876934"), "missing tau in:\n{text}");
}

#[test]
fn no_attack_means_all_zero() {
    let out = bdslab(&[
        "analytic",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--tau",
        "0",
        "--participation",
        "0",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    for line in text.lines().skip(2) {
        let rer = line.rsplit(',').next().unwrap();
        assert_eq!(rer, "0", "nonzero RER in line: {line}");
    }
}

#[test]
fn out_of_range_power_exits_with_one() {
    let out = bdslab(&[
        "analytic",
        "--alpha",
        "0.6",
        "--beta",
        "0.15",
        "--tau",
        "0.1",
        "--participation",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("invalid parameter"));
}

#[test]
fn infeasible_scenario_exits_with_two() {
    // tau*alpha = 0.27 swallows the whole beta = 0.01 victim.
    let out = bdslab(&[
        "analytic",
        "--alpha",
        "0.3",
        "--beta",
        "0.01",
        "--tau",
        "0.9",
        "--participation",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("infeasible"));
}

#[test]
fn oversized_game_exits_with_three() {
    let powers = vec!["0.001"; 13].join(",");
    let out = bdslab(&[
        "game",
        "solve",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--powers",
        &powers,
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_str(&out).contains("capacity"));
}

#[test]
fn usage_problems_exit_with_one_but_help_with_zero() {
    let out = bdslab(&["analytic", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = bdslab(&["simulate"]); // missing every required flag
    assert_eq!(out.status.code(), Some(1));
    let out = bdslab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let out = bdslab(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn zero_rounds_is_a_usage_error() {
    let out = bdslab(&[
        "simulate",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--participation",
        "0.2",
        "--rounds",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("rounds"));
}

#[test]
fn identical_simulations_are_byte_identical() {
    let args = [
        "simulate",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--participation",
        "0.6",
        "--rounds",
        "20000",
        "--seed",
        "9",
        "--replicas",
        "3",
        "--format",
        "csv",
    ];
    let a = bdslab(&args);
    let b = bdslab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"alpha": 0.18, "beta": 0.15, "optimal-tau": true, "participation": 0.2, "format": "csv"}"#,
    )
    .unwrap();
    let from_config = bdslab(&["analytic", "--config", cfg.to_str().unwrap()]);
    assert!(from_config.status.success());
    let text = stdout_str(&from_config);
    assert!(text.starts_with("# schema: bdslab/analytic/v1"));
    assert!(text.contains(",0.2,"), "participation from config:\n{text}");

    // The explicit flag overrides the config's 0.2 (format still comes from
    // the config, so the report stays CSV).
    let overridden = bdslab(&[
        "analytic",
        "--config",
        cfg.to_str().unwrap(),
        "--participation",
        "1.0",
    ]);
    assert!(overridden.status.success());
    let text = stdout_str(&overridden);
    assert!(
        text.contains(",1,bds_miner,0.840517"),
        "flag should win:\n{text}"
    );
    // And a format flag overrides the config's csv.
    let human = bdslab(&[
        "analytic",
        "--config",
        cfg.to_str().unwrap(),
        "--participation",
        "1.0",
        "--format",
        "human",
    ]);
    assert!(stdout_str(&human).contains("84.0517 %"));
}

#[test]
fn config_type_errors_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"alpha": "large"}"#).unwrap();
    let out = bdslab(&[
        "analytic",
        "--config",
        cfg.to_str().unwrap(),
        "--beta",
        "0.15",
        "--tau",
        "0.05",
        "--participation",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("alpha"));
}

#[test]
fn json_report_is_valid_and_carries_fractions() {
    let out = bdslab(&[
        "analytic",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--participation",
        "1.0",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let bds = value["rer"]["bds_miner"].as_f64().unwrap();
    assert!(
        (bds - 0.840_517).abs() < 1e-4,
        "fraction expected, got {bds}"
    );
    assert!(value["price_bounds"]["feasible"].as_bool().unwrap());
}

#[test]
fn output_flag_writes_the_report_and_env_sets_the_directory() {
    let dir = tempfile::tempdir().unwrap();
    let explicit = dir.path().join("report.csv");
    let out = bdslab(&[
        "analytic",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--participation",
        "1",
        "--format",
        "csv",
        "--output",
        explicit.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&explicit).unwrap();
    assert!(written.starts_with("# schema: bdslab/analytic/v1"));

    // A relative --output resolves under BDSLAB_OUTPUT_DIR.
    let out = Command::new(env!("CARGO_BIN_EXE_bdslab"))
        .args([
            "analytic",
            "--alpha",
            "0.18",
            "--beta",
            "0.15",
            "--optimal-tau",
            "--participation",
            "1",
            "--format",
            "csv",
            "--output",
            "nested.csv",
        ])
        .env("BDSLAB_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(dir.path().join("nested.csv")).unwrap(),
        written
    );
}

#[test]
fn sweep_victim_columns_are_identical_across_participations() {
    let out = bdslab(&[
        "sweep",
        "--alpha-min",
        "0.05",
        "--alpha-max",
        "0.25",
        "--alpha-step",
        "0.05",
        "--beta-min",
        "0.05",
        "--beta-max",
        "0.25",
        "--beta-step",
        "0.05",
        "--participations",
        "0.2,0.5,1.0",
        "--metric",
        "victim",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut per_cell: std::collections::BTreeMap<(String, String), Vec<String>> =
        std::collections::BTreeMap::new();
    for line in text.lines().skip(2).filter(|l| !l.starts_with('#')) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6, "unexpected row: {line}");
        assert_eq!(fields[4], "victim_own_miners");
        per_cell
            .entry((fields[0].to_string(), fields[1].to_string()))
            .or_default()
            .push(fields[5].to_string());
    }
    assert_eq!(per_cell.len(), 25);
    for ((alpha, beta), values) in per_cell {
        assert_eq!(values.len(), 3);
        assert!(
            values.iter().all(|v| v == &values[0]),
            "victim column varies at ({alpha}, {beta}): {values:?}"
        );
    }
}

#[test]
fn sweep_csv_is_byte_identical_across_runs() {
    let args = [
        "sweep",
        "--alpha-min",
        "0.1",
        "--alpha-max",
        "0.2",
        "--alpha-step",
        "0.02",
        "--beta-min",
        "0.1",
        "--beta-max",
        "0.2",
        "--beta-step",
        "0.02",
        "--format",
        "csv",
    ];
    let a = bdslab(&args);
    let b = bdslab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn repro_analytic_only_passes_every_cell() {
    let out = bdslab(&["repro-table3", "--analytic-only"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.contains("verdict: 10/10 cells pass"), "got:\n{text}");
}

#[test]
fn game_solve_finds_mutual_betrayal() {
    let out = bdslab(&[
        "game",
        "solve",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--powers",
        "0.0078,0.0078",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.contains("pure equilibria: B,B"), "got:\n{text}");
    assert!(text.contains("unique: yes"));
}

#[test]
fn game_principal_agent_prints_the_profile() {
    let out = bdslab(&[
        "game",
        "principal-agent",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--powers",
        "0.005,0.005",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.contains("H,B,B"), "got:\n{text}");
}

#[test]
fn game_rejects_csv_format() {
    let out = bdslab(&[
        "game",
        "ultimatum",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn share_level_flag_reaches_the_engine() {
    let out = bdslab(&[
        "simulate",
        "--alpha",
        "0.18",
        "--beta",
        "0.15",
        "--optimal-tau",
        "--participation",
        "0.5",
        "--rounds",
        "5000",
        "--seed",
        "3",
        "--share-level",
        "--difficulty",
        "10",
    ]);
    assert!(out.status.success());
    assert!(stdout_str(&out).contains("share-level, difficulty 10"));
}

#[test]
fn config_may_live_anywhere_on_disk() {
    // A config path with directories, exercised through Path::join.
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("configs");
    std::fs::create_dir(&sub).unwrap();
    let cfg: &Path = &sub.join("case2.json");
    std::fs::write(
        cfg,
        r#"{"alpha": 0.12, "beta": 0.18, "optimal-tau": true, "participation": 1.0}"#,
    )
    .unwrap();
    let out = bdslab(&["analytic", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout_str(&out).contains("81.2746 %"));
}
