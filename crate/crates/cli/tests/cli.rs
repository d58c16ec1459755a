//! End-to-end checks of the binary: artifact contents, determinism, exit
//! codes, and the override precedence between config file, environment, and
//! flags.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

/// Fresh command with the environment overrides cleared, so parallel tests
/// never leak seeds or output directories into each other.
fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_srqsim"));
    cmd.env_remove("SRQSIM_SEED");
    cmd.env_remove("SRQSIM_OUT");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary should launch")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fig1_sweep_matches_the_contract() {
    let dir = tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let output = run(bin().args(["fig1", "--grid", "1:100:1", "--out"]).arg(out));
        assert_exit(&output, 0);
    }

    let csv = fs::read_to_string(out_a.join("fig1.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "alpha_sq,p_err");
    assert_eq!(rows.len(), 101);

    let mut by_alpha = std::collections::BTreeMap::new();
    for row in &rows[1..] {
        let (alpha, p) = row.split_once(',').unwrap();
        // 15 significant digits: one leading digit plus 14 after the point.
        assert_eq!(p.split_once('.').unwrap().1.split('e').next().unwrap().len(), 14, "{p}");
        by_alpha.insert(alpha.parse::<f64>().unwrap() as u64, p.parse::<f64>().unwrap());
    }
    let at_50 = by_alpha[&50];
    assert!((0.005..=0.015).contains(&at_50), "p_err(50) = {at_50}");
    let sampled: Vec<f64> = [1, 2, 5, 10, 20, 50, 100].iter().map(|k| by_alpha[k]).collect();
    for pair in sampled.windows(2) {
        assert!(pair[1] <= pair[0], "error curve rose: {sampled:?}");
    }

    assert_eq!(
        fs::read(out_a.join("fig1.csv")).unwrap(),
        fs::read(out_b.join("fig1.csv")).unwrap(),
        "repeated sweeps must be byte-identical"
    );

    let manifest = read_json(&out_a.join("fig1_manifest.json"));
    assert_eq!(manifest["command"], "fig1");
    assert!(manifest["version"].as_str().unwrap().starts_with('v'));
    assert!(manifest["outputs"][0].as_str().unwrap().ends_with("fig1.csv"));
    assert!(manifest["config"]["seed"].is_u64());
    assert!(manifest["duration_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn fig1_single_point_reaches_the_weak_field_plateau() {
    let dir = tempdir().unwrap();
    let output = run(bin().args(["fig1", "--grid", "1e-6", "--out"]).arg(dir.path()));
    assert_exit(&output, 0);
    let csv = fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let p: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((p - 0.5).abs() < 1e-3, "weak-field p_err = {p}");
}

#[test]
fn bad_grids_and_flags_exit_with_usage_code() {
    let dir = tempdir().unwrap();
    for grid in ["0:10:1", "5:1:1", "a:b:c", "1:10:0.0", "1:2:3:4"] {
        let output = run(bin().args(["fig1", "--grid", grid, "--out"]).arg(dir.path()));
        assert_exit(&output, 64);
    }
    assert_exit(&run(bin().arg("not-a-command")), 64);
    assert_exit(&run(bin().args(["teleport", "--no-such-flag"])), 64);
    assert_exit(&run(bin().args(["teleport", "--alpha-sq", "-3"])), 64);
}

#[test]
fn broken_configs_exit_with_usage_code() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    fs::write(&config, "{ not json").unwrap();
    let output = run(bin().args(["teleport", "--config"]).arg(&config));
    assert_exit(&output, 64);

    let missing = dir.path().join("absent.json");
    let output = run(bin().args(["teleport", "--config"]).arg(&missing));
    assert_exit(&output, 64);

    let output = run(bin()
        .args(["teleport", "--trials", "1"])
        .env("SRQSIM_SEED", "not-a-number"));
    assert_exit(&output, 64);
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, b"file, not a directory").unwrap();
    let output = run(bin()
        .args(["fig1", "--grid", "1e-6", "--out"])
        .arg(blocker.join("sub")));
    assert_exit(&output, 2);
}

#[test]
fn ideal_teleport_runs_clean_and_reproduces_bit_for_bit() {
    let dir = tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let output = run(bin()
            .args(["teleport", "--ideal", "--trials", "40", "--seed", "42", "--out"])
            .arg(out));
        assert_exit(&output, 0);
    }

    let summary = read_json(&out_a.join("teleport_summary.json"));
    assert_eq!(summary["trials"], 40);
    assert_eq!(summary["seed"], 42);
    assert_eq!(summary["ideal_mode"], true);
    assert!(summary["min_fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
    assert_eq!(summary["below_trial_floor"], 0);
    assert_eq!(summary["thresholds_met"], true);

    let csv = fs::read_to_string(out_a.join("teleport_trials.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "trial,outcome,fidelity");
    assert_eq!(rows.len(), 41);
    let labels = ["psi+", "psi-", "phi+", "phi-"];
    for row in &rows[1..] {
        let outcome = row.split(',').nth(1).unwrap();
        assert!(labels.contains(&outcome), "{row}");
    }

    for name in ["teleport_summary.json", "teleport_trials.csv"] {
        assert_eq!(
            fs::read(out_a.join(name)).unwrap(),
            fs::read(out_b.join(name)).unwrap(),
            "{name} changed between identical runs"
        );
    }
}

#[test]
fn missed_thresholds_exit_one_but_still_write_artifacts() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("strict.json");
    // Physical drive at |alpha|^2 = 10 cannot hold a 0.99999 mean.
    fs::write(
        &config,
        r#"{
            "alpha_re": 3.1622776601683795,
            "trials": 20,
            "seed": 7,
            "tolerances": { "min_mean_fidelity": 0.99999 }
        }"#,
    )
    .unwrap();
    let output = run(bin()
        .args(["teleport", "--config"])
        .arg(&config)
        .args(["--out"])
        .arg(dir.path()));
    assert_exit(&output, 1);

    let summary = read_json(&dir.path().join("teleport_summary.json"));
    assert_eq!(summary["thresholds_met"], false);
    assert!(dir.path().join("teleport_trials.csv").exists());
    assert!(dir.path().join("teleport_manifest.json").exists());
}

#[test]
fn seed_and_output_overrides_are_layered() {
    let dir = tempdir().unwrap();
    let out_env = dir.path().join("from_env");
    let output = run(bin()
        .args(["teleport", "--ideal", "--trials", "3"])
        .env("SRQSIM_SEED", "99")
        .env("SRQSIM_OUT", &out_env));
    assert_exit(&output, 0);
    let summary = read_json(&out_env.join("teleport_summary.json"));
    assert_eq!(summary["seed"], 99, "environment seed should apply");

    let out_flag = dir.path().join("from_flag");
    let output = run(bin()
        .args(["teleport", "--ideal", "--trials", "3", "--seed", "123", "--out"])
        .arg(&out_flag)
        .env("SRQSIM_SEED", "99")
        .env("SRQSIM_OUT", dir.path().join("ignored")));
    assert_exit(&output, 0);
    let summary = read_json(&out_flag.join("teleport_summary.json"));
    assert_eq!(summary["seed"], 123, "flags must beat the environment");
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn analyzer_audit_is_exact_in_ideal_mode() {
    let dir = tempdir().unwrap();
    let output = run(bin()
        .args(["analyze", "--ideal", "--trials", "8", "--seed", "5", "--with-basis", "--out"])
        .arg(dir.path()));
    assert_exit(&output, 0);

    let confusion = read_json(&dir.path().join("analyze_confusion.json"));
    assert_eq!(confusion["trials_per_input"], 8);
    for (i, row) in confusion["matrix"].as_array().unwrap().iter().enumerate() {
        for (j, value) in row.as_array().unwrap().iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert_eq!(value.as_f64().unwrap(), expected, "confusion[{i}][{j}]");
        }
    }

    let records = fs::read_to_string(dir.path().join("analyze_records.jsonl")).unwrap();
    let lines: Vec<Value> = records
        .lines()
        .map(|line| serde_json::from_str(line).unwrap())
        .collect();
    assert_eq!(lines.len(), 8 * 8, "4 Bell + 4 basis inputs, 8 shots each");

    let stray: Vec<&Value> = lines
        .iter()
        .filter(|r| r["input_label"] == "|01>")
        .collect();
    assert_eq!(stray.len(), 8);
    for record in stray {
        let outcome = record["outcome"].as_str().unwrap();
        assert!(outcome.starts_with("psi"), "single photon read as {outcome}");
        let probs = record["probabilities"].as_array().unwrap();
        assert!((probs[0].as_f64().unwrap() - 0.5).abs() < 1e-9);
        assert!((probs[1].as_f64().unwrap() - 0.5).abs() < 1e-9);
        assert!(probs[2].as_f64().unwrap() < 1e-12);
        assert!(probs[3].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn gate_reports_cover_the_deterministic_set() {
    let dir = tempdir().unwrap();
    let output = run(bin().args(["gates", "--ideal", "--out"]).arg(dir.path()));
    assert_exit(&output, 0);

    let reports = read_json(&dir.path().join("gates_report.json"));
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 4);
    let names: Vec<&str> = reports.iter().map(|r| r["gate"].as_str().unwrap()).collect();
    assert!(names[0].starts_with("phase"));
    assert_eq!(&names[1..], ["hadamard", "controlled_sign", "cnot"]);

    for report in reports {
        assert!(report["max_deviation"].as_f64().unwrap() <= 1e-9, "{report}");
    }
    assert_eq!(reports[2]["idealized_sign_step"], true);
    assert_eq!(reports[3]["idealized_sign_step"], true);
    assert_eq!(reports[0]["idealized_sign_step"], false);

    // The sign gate leaves |11> with amplitude exactly -1.
    let last_row = &reports[2]["truth_table"][3];
    assert_eq!(last_row["input"], "|11>");
    let amp = last_row["output"][3].as_array().unwrap();
    assert!((amp[0].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!(amp[1].as_f64().unwrap().abs() < 1e-12);
}
