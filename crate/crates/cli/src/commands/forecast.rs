use std::path::PathBuf;

use alstlf_core::eval::forecast_recursive;
use alstlf_core::pipeline::timefmt;
use anyhow::{bail, Context, Result};
use clap::Args;

use crate::bundle::load_bundle;
use crate::config::ConfigFile;
use crate::io::{label_from_path, series_from_csv, write_atomic};

/// Recursive multi-step forecast from the end of a series: each corrected
/// prediction is appended to the window and fed back in.
#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Processed series CSV providing the seed window
    #[arg(long)]
    pub series: PathBuf,

    /// Model bundle path
    #[arg(long)]
    pub bundle: PathBuf,

    /// Number of steps to forecast
    #[arg(long)]
    pub steps: Option<usize>,

    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,

    /// key=value config file with defaults for omitted flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: ForecastArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let steps = cfg.resolve(args.steps, "steps", 96)?;

    let label = label_from_path(&args.series);
    let text = std::fs::read_to_string(&args.series)
        .with_context(|| format!("reading {}", args.series.display()))?;
    let series = series_from_csv(&text, &label)?;
    let bundle_text = std::fs::read_to_string(&args.bundle)
        .with_context(|| format!("reading {}", args.bundle.display()))?;
    let bundle = load_bundle(&bundle_text)?;

    if series.values.len() < bundle.tau {
        bail!(
            "series has {} points but the model needs a {}-point seed window",
            series.values.len(),
            bundle.tau
        );
    }
    let seed_window = &series.values[series.values.len() - bundle.tau..];
    let predictions = forecast_recursive(
        &bundle.lstm,
        &bundle.corrector,
        seed_window,
        steps,
        &bundle.normalizer,
    )?;

    let mut out = String::from("timestamp,predicted_kw\n");
    let first = series.timestamp_at(series.values.len());
    for (i, p) in predictions.iter().enumerate() {
        out.push_str(&format!(
            "{},{}\n",
            timefmt::format_iso8601_utc(first + series.step * i as i64),
            p
        ));
    }
    write_atomic(&args.out, &out)?;
    eprintln!("forecast {steps} steps for {label} into {}", args.out.display());
    Ok(())
}
