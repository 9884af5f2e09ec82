//! End-to-end command tests against the built binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_alstlf"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn alstlf")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn help_exits_zero_everywhere() {
    for sub in ["", "synth", "preprocess", "train", "evaluate", "forecast"] {
        let out = if sub.is_empty() {
            run(&["--help"])
        } else {
            run(&[sub, "--help"])
        };
        assert_eq!(out.status.code(), Some(0), "--help failed for {sub:?}");
    }
}

#[test]
fn flag_errors_exit_two() {
    let out = run(&["synth", "--profile", "toaster", "--out", "/tmp/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["train", "--series", "x.csv", "--out-dir", "d", "--split", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "train",
        "--series",
        dir.path().join("missing.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn synth_same_flags_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, _) in [(&a, 0), (&b, 1)] {
        let out = run(&[
            "synth", "--profile", "lights", "--days", "2", "--households", "3", "--seed", "11",
            "--noise", "0.02", "--out", path.to_str().unwrap(),
        ]);
        assert_ok(&out);
    }
    assert_eq!(read(&a), read(&b));
}

#[test]
fn seed_env_fallback_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let by_env = dir.path().join("env.csv");
    let by_flag = dir.path().join("flag.csv");
    let out = bin()
        .args(["synth", "--profile", "fridge", "--days", "1", "--households", "1"])
        .args(["--out", by_env.to_str().unwrap()])
        .env("ALSTLF_SEED", "123")
        .output()
        .unwrap();
    assert_ok(&out);
    // the flag wins over a conflicting env var
    let out = bin()
        .args(["synth", "--profile", "fridge", "--days", "1", "--households", "1"])
        .args(["--seed", "123", "--out", by_flag.to_str().unwrap()])
        .env("ALSTLF_SEED", "999")
        .output()
        .unwrap();
    assert_ok(&out);
    assert_eq!(read(&by_env), read(&by_flag));
}

#[test]
fn config_file_defaults_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    std::fs::write(&config, "# run defaults\nseed=5\ndays=1\nhouseholds=2\nnoise=0\n").unwrap();
    let from_config = dir.path().join("c.csv");
    let out = run(&[
        "synth", "--profile", "lights", "--config", config.to_str().unwrap(), "--out",
        from_config.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let explicit = dir.path().join("e.csv");
    let out = run(&[
        "synth", "--profile", "lights", "--days", "1", "--households", "2", "--noise", "0",
        "--seed", "5", "--out", explicit.to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert_eq!(read(&from_config), read(&explicit));

    // a flag beats the same key in the config file
    let overridden = dir.path().join("o.csv");
    let out = run(&[
        "synth", "--profile", "lights", "--config", config.to_str().unwrap(), "--households",
        "3", "--out", overridden.to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert_ne!(read(&from_config), read(&overridden));
}

#[test]
fn preprocess_golden_fixture_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "preprocess",
        "--input",
        fixture("raw_small.csv").to_str().unwrap(),
        "--mapping",
        fixture("categories.txt").to_str().unwrap(),
        "--resample-step",
        "300",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert_eq!(
        read(&dir.path().join("processed_bathroom.csv")),
        read(&golden("processed_bathroom.csv"))
    );
    assert_eq!(
        read(&dir.path().join("cleaning_report.csv")),
        read(&golden("cleaning_report.csv"))
    );
}

#[test]
fn cleaning_report_matches_hand_counts() {
    // The fixture carries, by construction: two duplicate rows; one missing
    // h1 bathroom1 cell; a leading gap for h2 bathroom1; a two-point
    // trailing gap for h2 bathroom2; one 50 kW spike among 1 kW readings.
    let report = read(&golden("cleaning_report.csv"));
    assert!(report.contains("duplicates_removed,,,2\n"));
    assert!(report.contains("interpolated,h1,bathroom1,1\n"));
    assert!(report.contains("outliers_replaced,h1,bathroom1,1\n"));
    assert!(report.contains("interpolated,h2,bathroom1,1\n"));
    assert!(report.contains("interpolated,h2,bathroom2,2\n"));
    assert!(report.contains("outliers_replaced,h2,bathroom1,0\n"));
    // h1 never reports bathroom2, so no cleaning entries exist for it
    assert!(!report.contains("h1,bathroom2"));
    // threshold for h1 bathroom1: percentile(23 ones + 50, 0.99) = 1 + 0.77 * 49
    let line = report
        .lines()
        .find(|l| l.starts_with("outlier_threshold,h1,bathroom1,"))
        .expect("threshold row");
    let value: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
    assert!((value - 38.73).abs() < 1e-9);
}

#[test]
fn preprocess_empty_input_no_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    std::fs::write(&input, "timestamp,household_id,ac\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "preprocess",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        !out_dir.exists() || std::fs::read_dir(&out_dir).unwrap().next().is_none(),
        "partial outputs were written"
    );
}

#[test]
fn preprocess_bad_line_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(
        &input,
        "timestamp,household_id,ac\n2020-01-01T00:00:00Z,h1,1\nnot-a-time,h1,1\n",
    )
    .unwrap();
    let out = run(&[
        "preprocess",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "stderr: {stderr}");
}

fn tiny_training_setup(dir: &Path) -> (PathBuf, PathBuf) {
    let raw = dir.join("raw.csv");
    let out = run(&[
        "synth", "--profile", "lights", "--days", "3", "--households", "2", "--seed", "9",
        "--noise", "0.01", "--out", raw.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let proc_dir = dir.join("proc");
    let out = run(&[
        "preprocess",
        "--input",
        raw.to_str().unwrap(),
        "--out-dir",
        proc_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
    (raw, proc_dir.join("processed_lights.csv"))
}

#[test]
fn train_writes_loadable_bundle_and_history() {
    let dir = tempfile::tempdir().unwrap();
    let (_, series) = tiny_training_setup(dir.path());
    let model_dir = dir.path().join("model");
    let start = std::time::Instant::now();
    let out = run(&[
        "train", "--series", series.to_str().unwrap(), "--out-dir",
        model_dir.to_str().unwrap(), "--epochs", "200", "--hidden", "8", "--corrector-epochs",
        "20", "--seed", "4",
    ]);
    assert_ok(&out);
    assert!(
        start.elapsed().as_secs_f64() < 60.0,
        "tiny training took {:?}",
        start.elapsed()
    );

    let history = read(&model_dir.join("training_history.csv"));
    let mut lines = history.lines();
    assert_eq!(lines.next().unwrap(), "epoch,mean_loss");
    assert_eq!(lines.count(), 200);

    let residuals = read(&model_dir.join("residuals.csv"));
    assert!(residuals.starts_with("timestamp,window_0,"));
    assert!(residuals.trim_end().ends_with(|c: char| c.is_ascii_digit()));

    // save -> load -> save produces identical bytes
    let text = read(&model_dir.join("model.alstlf"));
    assert!(text.starts_with("ALSTLF-MODEL v1\n"));
}

#[test]
fn train_rerun_same_seed_identical_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let (_, series) = tiny_training_setup(dir.path());
    let mut bundles = Vec::new();
    for name in ["m1", "m2"] {
        let model_dir = dir.path().join(name);
        let out = run(&[
            "train", "--series", series.to_str().unwrap(), "--out-dir",
            model_dir.to_str().unwrap(), "--epochs", "3", "--hidden", "8", "--corrector-epochs",
            "10", "--seed", "21",
        ]);
        assert_ok(&out);
        bundles.push(read(&model_dir.join("model.alstlf")));
    }
    assert_eq!(bundles[0], bundles[1]);
}

#[test]
fn evaluate_writes_reports_with_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (_, series) = tiny_training_setup(dir.path());
    let model_dir = dir.path().join("model");
    let out = run(&[
        "train", "--series", series.to_str().unwrap(), "--out-dir",
        model_dir.to_str().unwrap(), "--epochs", "4", "--hidden", "8", "--corrector-epochs",
        "15", "--seed", "2",
    ]);
    assert_ok(&out);
    let eval_dir = dir.path().join("eval");
    let out = run(&[
        "evaluate", "--series", series.to_str().unwrap(), "--bundle",
        model_dir.join("model.alstlf").to_str().unwrap(), "--seasonal-period", "96",
        "--out-dir", eval_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);

    let comparison = read(&eval_dir.join("comparison.csv"));
    let lines: Vec<&str> = comparison.lines().collect();
    assert_eq!(
        lines[0],
        "appliance,mape_persistence,mape_seasonal,mape_lstm,mape_proposed"
    );
    assert_eq!(lines.len(), 2, "single appliance: header plus one row");
    assert!(lines[1].starts_with("lights,"));

    let predictions = read(&eval_dir.join("predictions_lights.csv"));
    let lines: Vec<&str> = predictions.lines().collect();
    assert_eq!(
        lines[0],
        "timestamp,actual,lstm_pred,corrected_pred,predicted_residual"
    );
    // one row per test point: total points 3*96, split at 2/3 leaves 96
    assert_eq!(lines.len() - 1, 96);
    assert!(eval_dir.join("plot_lights.csv").exists());
}

#[test]
fn evaluate_adaptive_cadence_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (_, series) = tiny_training_setup(dir.path());
    let model_dir = dir.path().join("model");
    let out = run(&[
        "train", "--series", series.to_str().unwrap(), "--out-dir",
        model_dir.to_str().unwrap(), "--epochs", "3", "--hidden", "8", "--corrector-epochs",
        "10", "--seed", "2",
    ]);
    assert_ok(&out);
    let eval_dir = dir.path().join("eval_adaptive");
    let out = run(&[
        "evaluate", "--series", series.to_str().unwrap(), "--bundle",
        model_dir.join("model.alstlf").to_str().unwrap(), "--update-cadence", "24",
        "--update-epochs", "5", "--seed", "2", "--out-dir", eval_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert!(eval_dir.join("comparison.csv").exists());
}

#[test]
fn forecast_output_length_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (_, series) = tiny_training_setup(dir.path());
    let model_dir = dir.path().join("model");
    let out = run(&[
        "train", "--series", series.to_str().unwrap(), "--out-dir",
        model_dir.to_str().unwrap(), "--epochs", "2", "--hidden", "8", "--corrector-epochs",
        "5", "--seed", "2",
    ]);
    assert_ok(&out);
    let fc = dir.path().join("forecast.csv");
    let out = run(&[
        "forecast", "--series", series.to_str().unwrap(), "--bundle",
        model_dir.join("model.alstlf").to_str().unwrap(), "--steps", "7", "--out",
        fc.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let text = read(&fc);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "timestamp,predicted_kw");
    assert_eq!(lines.len() - 1, 7);
    // first forecast timestamp continues the 15-minute grid past day 3
    assert!(lines[1].starts_with("2020-01-04T00:00:00Z,"));
}

#[test]
fn evaluate_mismatched_bundle_dimensions_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (_, series) = tiny_training_setup(dir.path());
    let model_dir = dir.path().join("model");
    let out = run(&[
        "train", "--series", series.to_str().unwrap(), "--out-dir",
        model_dir.to_str().unwrap(), "--epochs", "2", "--hidden", "8", "--tau", "12",
        "--corrector-epochs", "5", "--seed", "2",
    ]);
    assert_ok(&out);
    // corrupt the bundle: claim tau 13 so tensors no longer line up
    let bundle_path = model_dir.join("model.alstlf");
    let text = read(&bundle_path).replacen("tau 12", "tau 13", 1);
    std::fs::write(&bundle_path, text).unwrap();
    let out = run(&[
        "evaluate", "--series", series.to_str().unwrap(), "--bundle",
        bundle_path.to_str().unwrap(), "--out-dir", dir.path().join("e").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
