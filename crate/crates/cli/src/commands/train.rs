use std::path::PathBuf;

use alstlf_core::corrector::{collect_residuals, residuals_csv, train_corrector};
use alstlf_core::pipeline::{fit_normalizer, make_windows, TimeSeries};
use alstlf_core::training::{history_csv, train_lstm, TrainConfig};
use alstlf_core::Rng;
use anyhow::{bail, Context, Result};
use clap::Args;

use crate::bundle::{save_bundle, ModelBundle};
use crate::config::ConfigFile;
use crate::io::{label_from_path, series_from_csv, write_atomic};

/// Train the LSTM and the error corrector on a processed series; writes the
/// model bundle, the epoch-loss history, and the training residuals.
#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Processed series CSV (`timestamp,value_kw`)
    #[arg(long)]
    pub series: PathBuf,

    /// Output directory (model.alstlf, training_history.csv, residuals.csv)
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Maximum training epochs
    #[arg(long)]
    pub epochs: Option<usize>,

    /// Adam learning rate
    #[arg(long)]
    pub learning_rate: Option<f64>,

    /// Global L2 gradient clipping threshold
    #[arg(long)]
    pub grad_threshold: Option<f64>,

    /// Input window length
    #[arg(long)]
    pub tau: Option<usize>,

    /// LSTM hidden units
    #[arg(long)]
    pub hidden: Option<usize>,

    /// Mini-batch size
    #[arg(long)]
    pub batch: Option<usize>,

    /// Corrector hidden width
    #[arg(long)]
    pub corrector_width: Option<usize>,

    /// Corrector training epochs (defaults to --epochs)
    #[arg(long)]
    pub corrector_epochs: Option<usize>,

    /// Corrector learning rate
    #[arg(long)]
    pub corrector_lr: Option<f64>,

    /// Train fraction: the first `split` of the time range trains the model
    #[arg(long, value_parser = parse_fraction)]
    pub split: Option<f64>,

    /// Scale by the training standard deviation in addition to centering
    #[arg(long)]
    pub normalize_std: bool,

    /// RNG seed; flags beat ALSTLF_SEED, which beats the config file
    #[arg(long, env = "ALSTLF_SEED")]
    pub seed: Option<u64>,

    /// key=value config file with defaults for omitted flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub(crate) fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("fraction {v} must lie strictly between 0 and 1"))
    }
}

pub fn run(args: TrainArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let train_cfg = TrainConfig {
        max_epochs: cfg.resolve(args.epochs, "epochs", 500)?,
        learning_rate: cfg.resolve(args.learning_rate, "learning_rate", 1e-4)?,
        grad_threshold: cfg.resolve(args.grad_threshold, "grad_threshold", 0.01)?,
        tau: cfg.resolve(args.tau, "tau", 12)?,
        hidden_units: cfg.resolve(args.hidden, "hidden_units", 200)?,
        batch_size: cfg.resolve(args.batch, "batch_size", 64)?,
        seed: cfg.resolve(args.seed, "seed", 42)?,
    };
    let corrector_width = cfg.resolve(args.corrector_width, "corrector_width", 32)?;
    let corrector_epochs = cfg.resolve(
        args.corrector_epochs,
        "corrector_epochs",
        train_cfg.max_epochs,
    )?;
    let corrector_lr = cfg.resolve(args.corrector_lr, "corrector_lr", 1e-3)?;
    let split = cfg.resolve(args.split, "split", 2.0 / 3.0)?;
    if !(0.0..1.0).contains(&split) || split == 0.0 {
        bail!("split fraction {split} must lie strictly between 0 and 1");
    }

    let text = std::fs::read_to_string(&args.series)
        .with_context(|| format!("reading {}", args.series.display()))?;
    let label = label_from_path(&args.series);
    let series = series_from_csv(&text, &label)?;

    let split_idx = (series.values.len() as f64 * split).floor() as usize;
    if split_idx <= train_cfg.tau {
        bail!(
            "train range has {split_idx} points, need more than tau = {}",
            train_cfg.tau
        );
    }
    let train_series = TimeSeries {
        values: series.values[..split_idx].to_vec(),
        ..series.clone()
    };
    let norm = fit_normalizer(&train_series, args.normalize_std)?;
    let normalized = norm.apply(&series);
    let data = make_windows(&normalized, train_cfg.tau)?;
    let boundary = series.timestamp_at(split_idx);
    let (train_data, _) = data.split_at_timestamp(boundary);

    let mut rng = Rng::new(train_cfg.seed);
    let (lstm, history) = train_lstm(&train_data, &train_cfg, &mut rng)?;
    let records = collect_residuals(&lstm, &train_data)?;
    let corr_cfg = TrainConfig {
        max_epochs: corrector_epochs,
        learning_rate: corrector_lr,
        ..train_cfg.clone()
    };
    let corrector = train_corrector(&records, corrector_width, &corr_cfg, &mut rng)?;

    let bundle = ModelBundle {
        tau: train_cfg.tau,
        hidden: train_cfg.hidden_units,
        input: 1,
        corrector_width,
        seed: train_cfg.seed,
        normalizer: norm,
        lstm,
        corrector,
    };
    write_atomic(&args.out_dir.join("model.alstlf"), &save_bundle(&bundle))?;
    write_atomic(
        &args.out_dir.join("training_history.csv"),
        &history_csv(&history),
    )?;
    write_atomic(&args.out_dir.join("residuals.csv"), &residuals_csv(&records))?;
    eprintln!(
        "trained {label}: {} train samples, final epoch loss {:.6e}",
        train_data.len(),
        history.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}
