use std::path::PathBuf;

use alstlf_core::pipeline::{
    aggregate_households, dedup_timestamps, ingest_csv, interpolate_missing, merge_categories,
    parse_category_mapping, replace_outliers, resample, RawRow, RawTable, TimeSeries,
};
use anyhow::{bail, Context, Result};
use clap::Args;

use crate::config::ConfigFile;
use crate::io::{series_to_csv, write_atomic};

/// Run the fixed cleaning pipeline over a raw CSV and write per-category
/// processed series plus a cleaning report.
#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Raw CSV input (`timestamp,household_id,<appliance...>`)
    #[arg(long)]
    pub input: PathBuf,

    /// Category mapping file (`appliance=category` lines)
    #[arg(long)]
    pub mapping: Option<PathBuf>,

    /// Comma-separated category filter; default processes every category
    #[arg(long, value_delimiter = ',')]
    pub appliances: Vec<String>,

    /// Output sampling step in seconds
    #[arg(long)]
    pub resample_step: Option<i64>,

    /// Outlier percentile threshold (fraction)
    #[arg(long)]
    pub outlier_q: Option<f64>,

    /// Look-back window for outlier replacement
    #[arg(long)]
    pub outlier_lookback: Option<usize>,

    /// Output directory
    #[arg(long)]
    pub out_dir: PathBuf,

    /// key=value config file with defaults for omitted flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Per-(household, appliance) cleaning counts, in deterministic order.
struct CleaningEntry {
    household: String,
    appliance: String,
    interpolated: usize,
    outliers_replaced: usize,
    threshold: f64,
}

pub fn run(args: PreprocessArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let resample_step = cfg.resolve(args.resample_step, "resample_step", 900)?;
    let outlier_q = cfg.resolve(args.outlier_q, "outlier_q", 0.99)?;
    let lookback = cfg.resolve(args.outlier_lookback, "outlier_lookback", 12)?;

    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let table = ingest_csv(&text)?;
    let (table, duplicates_removed) = dedup_timestamps(&table);
    if table.rows.is_empty() {
        bail!("input has no data rows");
    }

    let (cleaned, entries) = clean_per_household(&table, outlier_q, lookback)?;

    let mapping = match &args.mapping {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_category_mapping(&text)?
        }
        None => Vec::new(),
    };
    let merged = merge_categories(&cleaned, &mapping);

    let categories: Vec<String> = if args.appliances.is_empty() {
        merged.appliances.clone()
    } else {
        for want in &args.appliances {
            if !merged.appliances.contains(want) {
                bail!(
                    "category {want:?} not present after merging (have: {})",
                    merged.appliances.join(", ")
                );
            }
        }
        args.appliances.clone()
    };

    // Compute everything before writing anything, so failures leave no
    // partial outputs behind.
    let mut outputs: Vec<(PathBuf, String)> = Vec::new();
    for category in &categories {
        let aggregated = aggregate_households(&merged, category)?;
        let processed = resample(&aggregated, resample_step)?;
        outputs.push((
            args.out_dir.join(format!("processed_{category}.csv")),
            series_to_csv(&processed),
        ));
    }
    outputs.push((
        args.out_dir.join("cleaning_report.csv"),
        cleaning_report_csv(duplicates_removed, &entries),
    ));

    for (path, contents) in &outputs {
        write_atomic(path, contents)?;
    }
    eprintln!(
        "processed {} categories into {} (duplicates removed: {duplicates_removed})",
        categories.len(),
        args.out_dir.display()
    );
    Ok(())
}

/// Interpolation and outlier replacement per household and appliance, before
/// any merging or aggregation. Households that never report an appliance are
/// skipped for that appliance.
fn clean_per_household(
    table: &RawTable,
    outlier_q: f64,
    lookback: usize,
) -> Result<(RawTable, Vec<CleaningEntry>)> {
    let mut timestamps: Vec<i64> = table.rows.iter().map(|r| r.timestamp).collect();
    timestamps.sort_unstable();
    timestamps.dedup();
    let start = timestamps[0];
    let step = if timestamps.len() >= 2 {
        timestamps[1] - timestamps[0]
    } else {
        60
    };
    if step <= 0 {
        bail!("timestamps are not strictly increasing");
    }
    for w in timestamps.windows(2) {
        if (w[1] - w[0]) % step != 0 {
            bail!(
                "timestamps are not aligned to a uniform {step}-second grid ({} then {})",
                w[0],
                w[1]
            );
        }
    }
    let len = ((timestamps[timestamps.len() - 1] - start) / step) as usize + 1;

    let households = table.household_ids();
    let slot_of = |h: &str| households.iter().position(|x| x == h).unwrap();

    // grid[(household, appliance)][t]
    let n_app = table.appliances.len();
    let mut grid: Vec<Vec<Option<f64>>> = vec![vec![None; len]; households.len() * n_app];
    for row in &table.rows {
        let t = ((row.timestamp - start) / step) as usize;
        let h = slot_of(&row.household_id);
        for (a, &reading) in row.readings.iter().enumerate() {
            if let Some(v) = reading {
                grid[h * n_app + a][t] = Some(v);
            }
        }
    }

    let mut entries = Vec::new();
    let mut cleaned: Vec<Vec<Option<f64>>> = vec![vec![None; len]; households.len() * n_app];
    for (h, household) in households.iter().enumerate() {
        for (a, appliance) in table.appliances.iter().enumerate() {
            let cell = &grid[h * n_app + a];
            if cell.iter().all(Option::is_none) {
                continue;
            }
            let (values, interpolated) = interpolate_missing(cell)?;
            let series = TimeSeries {
                start,
                step,
                values,
                label: appliance.clone(),
                households: 1,
            };
            let (series, report) = replace_outliers(&series, outlier_q, lookback)?;
            for (t, &v) in series.values.iter().enumerate() {
                cleaned[h * n_app + a][t] = Some(v);
            }
            entries.push(CleaningEntry {
                household: household.clone(),
                appliance: appliance.clone(),
                interpolated,
                outliers_replaced: report.replaced,
                threshold: report.threshold,
            });
        }
    }

    let mut rows = Vec::with_capacity(len * households.len());
    for t in 0..len {
        for (h, household) in households.iter().enumerate() {
            let readings: Vec<Option<f64>> = (0..n_app)
                .map(|a| cleaned[h * n_app + a][t])
                .collect();
            rows.push(RawRow {
                timestamp: start + step * t as i64,
                household_id: household.clone(),
                readings,
            });
        }
    }
    Ok((
        RawTable {
            appliances: table.appliances.clone(),
            rows,
        },
        entries,
    ))
}

// Entries arrive household-sorted with appliances in header order, so the
// report is deterministic for identical inputs.
fn cleaning_report_csv(duplicates_removed: usize, entries: &[CleaningEntry]) -> String {
    let mut out = String::from("metric,household,appliance,value\n");
    out.push_str(&format!("duplicates_removed,,,{duplicates_removed}\n"));
    for e in entries {
        out.push_str(&format!(
            "interpolated,{},{},{}\n",
            e.household, e.appliance, e.interpolated
        ));
        out.push_str(&format!(
            "outliers_replaced,{},{},{}\n",
            e.household, e.appliance, e.outliers_replaced
        ));
        out.push_str(&format!(
            "outlier_threshold,{},{},{}\n",
            e.household, e.appliance, e.threshold
        ));
    }
    out
}
