//! File I/O helpers: atomic writes and the processed-series CSV format.

use std::fs;
use std::path::Path;

use alstlf_core::pipeline::timefmt;
use alstlf_core::TimeSeries;
use anyhow::{bail, Context, Result};

/// Writes via a temporary file in the same directory plus rename, so readers
/// never observe a partial file and failed runs leave no output behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let dir = dir.unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    std::io::Write::write_all(&mut tmp, contents.as_bytes())
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Serializes a series as `timestamp,value_kw` with ISO-8601 UTC timestamps.
pub fn series_to_csv(series: &TimeSeries) -> String {
    let mut out = String::from("timestamp,value_kw\n");
    for (i, v) in series.values.iter().enumerate() {
        out.push_str(&format!(
            "{},{}\n",
            timefmt::format_iso8601_utc(series.timestamp_at(i)),
            v
        ));
    }
    out
}

/// Parses a processed-series CSV. Requires the exact header, ISO-8601 UTC
/// timestamps on a uniform grid, and finite values.
pub fn series_from_csv(text: &str, label: &str) -> Result<TimeSeries> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == "timestamp,value_kw" => {}
        Some((_, header)) => bail!("line 1: expected header `timestamp,value_kw`, got {header:?}"),
        None => bail!("empty series file"),
    }
    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let (ts, value) = line
            .split_once(',')
            .with_context(|| format!("line {line_no}: expected `timestamp,value`"))?;
        let t = timefmt::parse_iso8601_utc(ts)
            .with_context(|| format!("line {line_no}: bad timestamp {ts:?}"))?;
        let v: f64 = value
            .parse()
            .with_context(|| format!("line {line_no}: bad value {value:?}"))?;
        if !v.is_finite() {
            bail!("line {line_no}: non-finite value {value:?}");
        }
        timestamps.push(t);
        values.push(v);
    }
    if timestamps.len() < 2 {
        bail!("series needs at least 2 points, got {}", timestamps.len());
    }
    let start = timestamps[0];
    let step = timestamps[1] - start;
    if step <= 0 {
        bail!("timestamps must be strictly increasing");
    }
    for (i, &t) in timestamps.iter().enumerate() {
        let expect = start + step * i as i64;
        if t != expect {
            bail!(
                "line {}: timestamp off the uniform grid (expected {})",
                i + 2,
                timefmt::format_iso8601_utc(expect)
            );
        }
    }
    Ok(TimeSeries {
        start,
        step,
        values,
        label: label.to_string(),
        households: 0,
    })
}

/// Serializes a raw table in the ingestion format.
pub fn raw_table_to_csv(table: &alstlf_core::RawTable) -> String {
    let mut out = String::from("timestamp,household_id");
    for a in &table.appliances {
        out.push(',');
        out.push_str(a);
    }
    out.push('\n');
    for row in &table.rows {
        out.push_str(&timefmt::format_iso8601_utc(row.timestamp));
        out.push(',');
        out.push_str(&row.household_id);
        for r in &row.readings {
            out.push(',');
            if let Some(v) = r {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    out
}

/// Appliance label for a series file: the file stem, with a leading
/// `processed_` prefix stripped.
pub fn label_from_path(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string());
    stem.strip_prefix("processed_").unwrap_or(&stem).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_roundtrip() {
        let s = TimeSeries {
            start: 1577836800,
            step: 900,
            values: vec![1.5, 2.25, 0.125],
            label: "ac".into(),
            households: 0,
        };
        let csv = series_to_csv(&s);
        let parsed = series_from_csv(&csv, "ac").unwrap();
        assert_eq!(parsed, s);
    }

    #[test]
    fn series_rejects_gaps() {
        let text = "timestamp,value_kw\n\
                    2020-01-01T00:00:00Z,1\n\
                    2020-01-01T00:15:00Z,2\n\
                    2020-01-01T00:45:00Z,3\n";
        assert!(series_from_csv(text, "x").is_err());
    }

    #[test]
    fn label_strips_prefix() {
        assert_eq!(label_from_path(Path::new("/a/processed_ac.csv")), "ac");
        assert_eq!(label_from_path(Path::new("ev.csv")), "ev");
    }
}
