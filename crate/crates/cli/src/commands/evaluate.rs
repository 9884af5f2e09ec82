use std::path::PathBuf;

use alstlf_core::corrector::{update_corrector, CorrectorParams, ResidualRecord};
use alstlf_core::eval::{
    baseline_persistence, baseline_seasonal, compare_report, evaluate_one_step, mape, plot_csv,
    predictions_csv, ApplianceEvaluation, ForecastReport, MAPE_EPS,
};
use alstlf_core::lstm::predict_scalar_window;
use alstlf_core::pipeline::make_windows;
use alstlf_core::training::TrainConfig;
use alstlf_core::{Rng, WindowedDataset};
use anyhow::{bail, Context, Result};
use clap::Args;

use crate::bundle::{load_bundle, ModelBundle};
use crate::config::ConfigFile;
use crate::io::{label_from_path, series_from_csv, write_atomic};

/// One-step evaluation of one or more (series, bundle) pairs over the test
/// range; writes per-appliance prediction and plot CSVs plus a comparison
/// table against persistence and seasonal-naive baselines.
#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Processed series CSV; repeat for several appliances
    #[arg(long, required = true)]
    pub series: Vec<PathBuf>,

    /// Model bundle path; repeat to pair with each --series in order
    #[arg(long, required = true)]
    pub bundle: Vec<PathBuf>,

    /// Train fraction used when the models were trained
    #[arg(long, value_parser = super::train::parse_fraction)]
    pub split: Option<f64>,

    /// Seasonal-naive baseline period, in samples
    #[arg(long)]
    pub seasonal_period: Option<usize>,

    /// Progressive corrector refresh: fine-tune on each batch of N new test
    /// residuals. Omit the flag to disable; the bare flag refreshes every 96
    /// records (one day of 15-minute data)
    #[arg(long, num_args = 0..=1, default_missing_value = "96")]
    pub update_cadence: Option<usize>,

    /// Fine-tuning epochs per adaptive update
    #[arg(long)]
    pub update_epochs: Option<usize>,

    /// RNG seed for adaptive updates; flags beat ALSTLF_SEED
    #[arg(long, env = "ALSTLF_SEED")]
    pub seed: Option<u64>,

    /// Output directory
    #[arg(long)]
    pub out_dir: PathBuf,

    /// key=value config file with defaults for omitted flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: EvaluateArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let split = cfg.resolve(args.split, "split", 2.0 / 3.0)?;
    let period = cfg.resolve(args.seasonal_period, "seasonal_period", 96)?;
    let cadence = cfg.resolve(args.update_cadence, "update_cadence", 0)?;
    let update_epochs = cfg.resolve(
        args.update_epochs,
        "update_epochs",
        alstlf_core::corrector::DEFAULT_UPDATE_EPOCHS,
    )?;
    let seed = cfg.resolve(args.seed, "seed", 42)?;

    if args.series.len() != args.bundle.len() {
        bail!(
            "{} --series but {} --bundle flags; they pair up one to one",
            args.series.len(),
            args.bundle.len()
        );
    }

    let mut evaluations = Vec::new();
    let mut outputs: Vec<(PathBuf, String)> = Vec::new();
    for (series_path, bundle_path) in args.series.iter().zip(&args.bundle) {
        let label = label_from_path(series_path);
        let text = std::fs::read_to_string(series_path)
            .with_context(|| format!("reading {}", series_path.display()))?;
        let series = series_from_csv(&text, &label)?;
        let bundle_text = std::fs::read_to_string(bundle_path)
            .with_context(|| format!("reading {}", bundle_path.display()))?;
        let bundle = load_bundle(&bundle_text)
            .with_context(|| format!("loading {}", bundle_path.display()))?;

        let split_idx = (series.values.len() as f64 * split).floor() as usize;
        if split_idx < bundle.tau || split_idx + 1 >= series.values.len() {
            bail!("split {split} leaves no usable test range for {label}");
        }
        let normalized = bundle.normalizer.apply(&series);
        let data = make_windows(&normalized, bundle.tau)?;
        let boundary = series.timestamp_at(split_idx);
        let (_, test_data) = data.split_at_timestamp(boundary);
        if test_data.is_empty() {
            bail!("no test samples for {label}");
        }

        let report = if cadence == 0 {
            evaluate_one_step(&label, &bundle.lstm, &bundle.corrector, &test_data, &bundle.normalizer)?
        } else {
            let mut rng = Rng::new(seed);
            evaluate_adaptive(
                &label,
                &bundle,
                &test_data,
                cadence,
                update_epochs,
                &mut rng,
            )?
        };

        let persistence_pred = baseline_persistence(&series.values, split_idx);
        let seasonal_pred = baseline_seasonal(&series.values, split_idx, period)?;
        outputs.push((
            args.out_dir.join(format!("predictions_{label}.csv")),
            predictions_csv(&report),
        ));
        outputs.push((
            args.out_dir.join(format!("plot_{label}.csv")),
            plot_csv(&report),
        ));
        evaluations.push(ApplianceEvaluation {
            report,
            persistence_pred,
            seasonal_pred,
        });
    }

    outputs.push((
        args.out_dir.join("comparison.csv"),
        compare_report(&evaluations)?,
    ));
    for (path, contents) in &outputs {
        write_atomic(path, contents)?;
    }
    for e in &evaluations {
        eprintln!(
            "{}: mape_lstm {:.4} mape_proposed {:.4} (excluded {} zero actuals)",
            e.report.label, e.report.mape_lstm, e.report.mape_corrected, e.report.excluded_zero_points
        );
    }
    Ok(())
}

/// One-step evaluation with progressive corrector refreshes: after every
/// `cadence` test points the observed residuals are folded into the
/// corrector by a short fine-tuning run, mirroring how new smart-meter data
/// becomes available over time.
fn evaluate_adaptive(
    label: &str,
    bundle: &ModelBundle,
    test: &WindowedDataset,
    cadence: usize,
    update_epochs: usize,
    rng: &mut Rng,
) -> Result<ForecastReport> {
    let norm = &bundle.normalizer;
    let mut corrector = bundle.corrector.clone();
    let update_cfg = TrainConfig {
        max_epochs: update_epochs,
        learning_rate: 1e-3,
        tau: bundle.tau,
        hidden_units: bundle.hidden,
        ..TrainConfig::default()
    };

    let mut actual = Vec::with_capacity(test.len());
    let mut lstm_pred = Vec::with_capacity(test.len());
    let mut corrected_pred = Vec::with_capacity(test.len());
    let mut pending: Vec<ResidualRecord> = Vec::new();
    for k in 0..test.len() {
        let window = &test.windows[k];
        let p_hat = predict_scalar_window(&bundle.lstm, window)?;
        let e_hat = corrector_forward_checked(&corrector, window)?;
        actual.push(norm.invert_value(test.targets[k]));
        lstm_pred.push(norm.invert_value(p_hat));
        corrected_pred.push(norm.invert_value(p_hat + e_hat));
        pending.push(ResidualRecord {
            window: window.clone(),
            residual: test.targets[k] - p_hat,
            timestamp: test.timestamps[k],
        });
        if pending.len() >= cadence {
            corrector = update_corrector(&corrector, &pending, update_epochs, &update_cfg, rng)?;
            pending.clear();
        }
    }
    let (mape_lstm, excluded) = mape(&actual, &lstm_pred, MAPE_EPS)?;
    let (mape_corrected, _) = mape(&actual, &corrected_pred, MAPE_EPS)?;
    Ok(ForecastReport {
        label: label.to_string(),
        timestamps: test.timestamps.clone(),
        actual,
        lstm_pred,
        corrected_pred,
        mape_lstm,
        mape_corrected,
        excluded_zero_points: excluded,
    })
}

fn corrector_forward_checked(corrector: &CorrectorParams, window: &[f64]) -> Result<f64> {
    Ok(alstlf_core::corrector::corrector_forward(corrector, window)?)
}
