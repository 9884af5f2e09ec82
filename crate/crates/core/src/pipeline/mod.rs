//! Data pipeline: CSV ingestion, cleaning, outlier handling, category
//! merging, household aggregation, resampling, normalization, and windowing.
//!
//! The composition order is fixed: dedup -> interpolate -> outlier-replace ->
//! merge -> aggregate -> resample -> normalize -> window. Cleaning runs per
//! household before any aggregation. Re-running the pipeline on identical
//! input yields identical bytes.

pub mod synth;
pub mod timefmt;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::numerics::percentile;

/// One parsed CSV row: a timestamped set of per-appliance readings for one
/// household. `None` is a missing reading, never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub timestamp: i64,
    pub household_id: String,
    pub readings: Vec<Option<f64>>,
}

/// Raw ingested table. `appliances` preserves the header column order and
/// each row's readings align with it.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub appliances: Vec<String>,
    pub rows: Vec<RawRow>,
}

impl RawTable {
    pub fn appliance_index(&self, name: &str) -> Option<usize> {
        self.appliances.iter().position(|a| a == name)
    }

    pub fn household_ids(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.rows.iter().map(|r| r.household_id.as_str()).collect();
        set.into_iter().map(String::from).collect()
    }
}

/// Uniformly sampled dense series of kW readings.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub start: i64,
    pub step: i64,
    pub values: Vec<f64>,
    pub label: String,
    pub households: usize,
}

impl TimeSeries {
    pub fn timestamp_at(&self, index: usize) -> i64 {
        self.start + self.step * index as i64
    }
}

/// Zero-center normalization fitted on the training range only. `scale` is
/// 1 unless std scaling was requested at fit time.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub mean: f64,
    pub scale: f64,
}

impl Normalizer {
    pub fn apply_value(&self, v: f64) -> f64 {
        (v - self.mean) / self.scale
    }

    pub fn invert_value(&self, v: f64) -> f64 {
        v * self.scale + self.mean
    }

    pub fn apply(&self, s: &TimeSeries) -> TimeSeries {
        TimeSeries {
            values: s.values.iter().map(|&v| self.apply_value(v)).collect(),
            ..s.clone()
        }
    }

    pub fn invert(&self, s: &TimeSeries) -> TimeSeries {
        TimeSeries {
            values: s.values.iter().map(|&v| self.invert_value(v)).collect(),
            ..s.clone()
        }
    }
}

/// Sliding windows of length `tau` paired with the next value as target.
/// `timestamps[k]` is the target time of sample `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    pub tau: usize,
    pub windows: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub timestamps: Vec<i64>,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Samples whose target index falls before/after the split index of the
    /// originating series. Windows for early test targets reach back into
    /// the train range, as in any continuous-time split.
    pub fn split_at_timestamp(&self, boundary: i64) -> (WindowedDataset, WindowedDataset) {
        let mut train = WindowedDataset {
            tau: self.tau,
            windows: Vec::new(),
            targets: Vec::new(),
            timestamps: Vec::new(),
        };
        let mut test = train.clone();
        for k in 0..self.len() {
            let dst = if self.timestamps[k] < boundary { &mut train } else { &mut test };
            dst.windows.push(self.windows[k].clone());
            dst.targets.push(self.targets[k]);
            dst.timestamps.push(self.timestamps[k]);
        }
        (train, test)
    }
}

/// Parses raw CSV text with header `timestamp,household_id,<appliance...>`.
/// Timestamps are ISO-8601 UTC; an empty cell is a missing reading. Errors
/// carry the 1-based line number.
pub fn ingest_csv(text: &str) -> Result<RawTable> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Csv {
        line: 1,
        msg: "empty input, expected a header".into(),
    })?;
    let header = header.trim_end_matches('\r');
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "timestamp" || cols[1] != "household_id" {
        return Err(Error::Csv {
            line: 1,
            msg: format!(
                "header must be `timestamp,household_id,<appliance...>`, got {header:?}"
            ),
        });
    }
    if cols[2..].iter().any(|c| c.is_empty()) {
        return Err(Error::Csv {
            line: 1,
            msg: "empty appliance column name".into(),
        });
    }
    let appliances: Vec<String> = cols[2..].iter().map(|s| s.to_string()).collect();

    let mut rows = Vec::new();
    for (idx, raw_line) in lines {
        let line_no = idx + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 + appliances.len() {
            return Err(Error::Csv {
                line: line_no,
                msg: format!(
                    "expected {} fields, got {}",
                    2 + appliances.len(),
                    fields.len()
                ),
            });
        }
        let timestamp = timefmt::parse_iso8601_utc(fields[0]).ok_or_else(|| Error::Csv {
            line: line_no,
            msg: format!("bad timestamp {:?}", fields[0]),
        })?;
        if fields[1].is_empty() {
            return Err(Error::Csv {
                line: line_no,
                msg: "empty household_id".into(),
            });
        }
        let mut readings = Vec::with_capacity(appliances.len());
        for f in &fields[2..] {
            if f.is_empty() {
                readings.push(None);
            } else {
                let v: f64 = f.parse().map_err(|_| Error::Csv {
                    line: line_no,
                    msg: format!("bad reading {f:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Csv {
                        line: line_no,
                        msg: format!("non-finite reading {f:?}"),
                    });
                }
                readings.push(Some(v));
            }
        }
        rows.push(RawRow {
            timestamp,
            household_id: fields[1].to_string(),
            readings,
        });
    }
    Ok(RawTable { appliances, rows })
}

/// Keeps only the first occurrence in file order of each
/// (timestamp, household) pair. Returns the table and the number removed.
pub fn dedup_timestamps(table: &RawTable) -> (RawTable, usize) {
    let mut seen: HashSet<(i64, &str)> = HashSet::new();
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut removed = 0;
    for row in &table.rows {
        if seen.insert((row.timestamp, row.household_id.as_str())) {
            rows.push(row.clone());
        } else {
            removed += 1;
        }
    }
    (
        RawTable {
            appliances: table.appliances.clone(),
            rows,
        },
        removed,
    )
}

/// Fills missing values: interior gaps linearly between the nearest present
/// neighbors, leading/trailing gaps with the nearest present value. Returns
/// the dense values and how many were filled. Rejects an all-missing input.
pub fn interpolate_missing(values: &[Option<f64>]) -> Result<(Vec<f64>, usize)> {
    let present: Vec<usize> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|_| i))
        .collect();
    if present.is_empty() {
        return Err(Error::Empty { what: "series (all values missing)" });
    }
    let filled_count = values.len() - present.len();
    let mut out = Vec::with_capacity(values.len());
    let first = present[0];
    let last = *present.last().unwrap();
    let mut next_anchor = 0; // index into `present` of the anchor at or after i
    for i in 0..values.len() {
        if let Some(v) = values[i] {
            out.push(v);
            continue;
        }
        if i < first {
            out.push(values[first].unwrap());
        } else if i > last {
            out.push(values[last].unwrap());
        } else {
            while present[next_anchor] < i {
                next_anchor += 1;
            }
            let hi = present[next_anchor];
            let lo = present[next_anchor - 1];
            let vlo = values[lo].unwrap();
            let vhi = values[hi].unwrap();
            let frac = (i - lo) as f64 / (hi - lo) as f64;
            out.push(vlo + (vhi - vlo) * frac);
        }
    }
    Ok((out, filled_count))
}

/// Counts and the threshold from one outlier pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierReport {
    pub replaced: usize,
    pub threshold: f64,
}

/// Replaces values above the q-percentile threshold (computed once on the
/// input) with the mean of the previous `lookback` already-processed values;
/// fewer near the start, and the threshold itself if none precede. The
/// output maximum never exceeds the threshold.
pub fn replace_outliers(
    series: &TimeSeries,
    q: f64,
    lookback: usize,
) -> Result<(TimeSeries, OutlierReport)> {
    if series.values.is_empty() {
        return Err(Error::Empty { what: "series" });
    }
    let threshold = percentile(&series.values, q)?;
    let mut values = Vec::with_capacity(series.values.len());
    let mut replaced = 0;
    for (i, &v) in series.values.iter().enumerate() {
        if v > threshold {
            replaced += 1;
            if i == 0 {
                values.push(threshold);
            } else {
                let from = i.saturating_sub(lookback);
                let window = &values[from..i];
                let mean = window.iter().sum::<f64>() / window.len() as f64;
                values.push(mean);
            }
        } else {
            values.push(v);
        }
    }
    Ok((
        TimeSeries {
            values,
            ..series.clone()
        },
        OutlierReport { replaced, threshold },
    ))
}

/// Parses a category mapping file: `appliance_name=category_name` lines,
/// `#` comments and blank lines allowed.
pub fn parse_category_mapping(text: &str) -> Result<Vec<(String, String)>> {
    let mut mapping = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, category) = line.split_once('=').ok_or_else(|| Error::Csv {
            line: idx + 1,
            msg: format!("expected `appliance=category`, got {line:?}"),
        })?;
        let (name, category) = (name.trim(), category.trim());
        if name.is_empty() || category.is_empty() {
            return Err(Error::Csv {
                line: idx + 1,
                msg: "empty appliance or category name".into(),
            });
        }
        mapping.push((name.to_string(), category.to_string()));
    }
    Ok(mapping)
}

/// Sums columns that share a category, per row. Unmapped appliance names map
/// to themselves. A missing reading counts as zero only when at least one
/// sibling column is present; if all siblings are missing the merged value
/// stays missing. Category order follows first appearance in the header.
pub fn merge_categories(table: &RawTable, mapping: &[(String, String)]) -> RawTable {
    let category_of = |name: &str| -> String {
        mapping
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| name.to_string())
    };
    let mut categories: Vec<String> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (col, name) in table.appliances.iter().enumerate() {
        let cat = category_of(name);
        match categories.iter().position(|c| *c == cat) {
            Some(k) => members[k].push(col),
            None => {
                categories.push(cat);
                members.push(vec![col]);
            }
        }
    }
    let rows = table
        .rows
        .iter()
        .map(|row| {
            let readings = members
                .iter()
                .map(|cols| {
                    let present: Vec<f64> =
                        cols.iter().filter_map(|&c| row.readings[c]).collect();
                    if present.is_empty() {
                        None
                    } else {
                        Some(present.iter().sum())
                    }
                })
                .collect();
            RawRow {
                timestamp: row.timestamp,
                household_id: row.household_id.clone(),
                readings,
            }
        })
        .collect();
    RawTable {
        appliances: categories,
        rows,
    }
}

/// Sums one category's readings across all households per timestamp.
/// Summation runs in sorted (timestamp, household) order, so the result does
/// not depend on row order. Requires the timestamps to form a uniform grid.
pub fn aggregate_households(table: &RawTable, category: &str) -> Result<TimeSeries> {
    let col = table
        .appliance_index(category)
        .ok_or_else(|| Error::UnknownCategory(category.to_string()))?;
    if table.rows.is_empty() {
        return Err(Error::Empty { what: "table" });
    }
    let mut per_ts: BTreeMap<i64, BTreeMap<&str, f64>> = BTreeMap::new();
    for row in &table.rows {
        if let Some(v) = row.readings[col] {
            per_ts
                .entry(row.timestamp)
                .or_default()
                .insert(row.household_id.as_str(), v);
        }
    }
    if per_ts.is_empty() {
        return Err(Error::Empty { what: "category readings" });
    }
    let timestamps: Vec<i64> = per_ts.keys().copied().collect();
    let start = timestamps[0];
    let step = if timestamps.len() >= 2 {
        timestamps[1] - start
    } else {
        1
    };
    for (i, &t) in timestamps.iter().enumerate() {
        let expect = start + step * i as i64;
        if t != expect {
            return Err(Error::IrregularGrid {
                msg: format!("expected {expect}, found {t}"),
            });
        }
    }
    let values = per_ts
        .values()
        .map(|households| households.values().sum())
        .collect();
    Ok(TimeSeries {
        start,
        step,
        values,
        label: category.to_string(),
        households: table.household_ids().len(),
    })
}

/// Downsamples by averaging consecutive blocks; power in kW stays power.
/// The new step must be a positive multiple of the old; a partial trailing
/// block is dropped.
pub fn resample(s: &TimeSeries, new_step: i64) -> Result<TimeSeries> {
    if new_step <= 0 || s.step <= 0 || new_step % s.step != 0 {
        return Err(Error::BadResampleStep {
            step: s.step,
            new_step,
        });
    }
    let ratio = (new_step / s.step) as usize;
    if ratio == 1 {
        return Ok(s.clone());
    }
    let blocks = s.values.len() / ratio;
    let values = (0..blocks)
        .map(|b| {
            let chunk = &s.values[b * ratio..(b + 1) * ratio];
            chunk.iter().sum::<f64>() / ratio as f64
        })
        .collect();
    Ok(TimeSeries {
        start: s.start,
        step: new_step,
        values,
        label: s.label.clone(),
        households: s.households,
    })
}

/// Fits zero-center normalization on the training range only. With
/// `scale_by_std` the values are additionally divided by the population
/// standard deviation (flag defaults off everywhere).
pub fn fit_normalizer(train: &TimeSeries, scale_by_std: bool) -> Result<Normalizer> {
    if train.values.is_empty() {
        return Err(Error::Empty { what: "training series" });
    }
    let n = train.values.len() as f64;
    let mean = train.values.iter().sum::<f64>() / n;
    let scale = if scale_by_std {
        let var = train.values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let std = var.sqrt();
        if std > 0.0 {
            std
        } else {
            1.0
        }
    } else {
        1.0
    };
    Ok(Normalizer { mean, scale })
}

/// Sliding-window dataset per the one-step-ahead task: sample k has window
/// `values[k..k+tau]` and target `values[k+tau]`.
pub fn make_windows(s: &TimeSeries, tau: usize) -> Result<WindowedDataset> {
    if tau == 0 {
        return Err(Error::ZeroDimension { what: "window length" });
    }
    if s.values.len() <= tau {
        return Err(Error::SeriesTooShort {
            len: s.values.len(),
            min: tau,
        });
    }
    let count = s.values.len() - tau;
    let mut windows = Vec::with_capacity(count);
    let mut targets = Vec::with_capacity(count);
    let mut timestamps = Vec::with_capacity(count);
    for k in 0..count {
        windows.push(s.values[k..k + tau].to_vec());
        targets.push(s.values[k + tau]);
        timestamps.push(s.timestamp_at(k + tau));
    }
    Ok(WindowedDataset {
        tau,
        windows,
        targets,
        timestamps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries {
            start: 0,
            step: 60,
            values,
            label: "test".into(),
            households: 1,
        }
    }

    #[test]
    fn ingest_wellformed() {
        let text = "timestamp,household_id,ac,ev\n\
                    2020-01-01T00:00:00Z,h1,1.5,\n\
                    2020-01-01T00:01:00Z,h1,2.0,3.3\n";
        let t = ingest_csv(text).unwrap();
        assert_eq!(t.appliances, vec!["ac", "ev"]);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].readings, vec![Some(1.5), None]);
        assert_eq!(t.rows[1].readings, vec![Some(2.0), Some(3.3)]);
    }

    #[test]
    fn ingest_bad_timestamp_names_line() {
        let text = "timestamp,household_id,ac\n\
                    2020-01-01T00:00:00Z,h1,1\n\
                    2020-01-01T00:01:00Z,h1,1\n\
                    2020-01-01T00:02:00Z,h1,1\n\
                    2020-01-01T00:03:00Z,h1,1\n\
                    2020-01-01T00:04:00Z,h1,1\n\
                    not-a-time,h1,1\n";
        let err = ingest_csv(text).unwrap_err();
        assert!(err.to_string().starts_with("line 7:"), "{err}");
    }

    #[test]
    fn ingest_rejects_bad_header() {
        assert!(ingest_csv("time,household_id,ac\n").is_err());
        assert!(ingest_csv("timestamp,household_id\n").is_err());
        assert!(ingest_csv("").is_err());
    }

    #[test]
    fn dedup_keeps_first_per_household() {
        let text = "timestamp,household_id,ac\n\
                    2020-01-01T00:00:00Z,h1,1.0\n\
                    2020-01-01T00:00:00Z,h1,9.0\n\
                    2020-01-01T00:00:00Z,h2,2.0\n";
        let t = ingest_csv(text).unwrap();
        let (d, removed) = dedup_timestamps(&t);
        assert_eq!(removed, 1);
        assert_eq!(d.rows.len(), 2);
        assert_eq!(d.rows[0].readings[0], Some(1.0));
        assert_eq!(d.rows[1].household_id, "h2");

        let (same, removed) = dedup_timestamps(&d);
        assert_eq!(removed, 0);
        assert_eq!(same, d);
    }

    #[test]
    fn interpolation_cases() {
        let (v, n) = interpolate_missing(&[Some(1.0), None, Some(3.0)]).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
        assert_eq!(n, 1);

        let (v, _) = interpolate_missing(&[None, Some(5.0), Some(5.0)]).unwrap();
        assert_eq!(v, vec![5.0, 5.0, 5.0]);

        let (v, _) = interpolate_missing(&[Some(1.0), None, None, Some(4.0)]).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0]);

        assert!(interpolate_missing(&[None, None]).is_err());
    }

    #[test]
    fn outliers_unchanged_when_under_threshold() {
        let s = series(vec![1.0, 2.0, 3.0, 2.0]);
        let (out, report) = replace_outliers(&s, 1.0, 12).unwrap();
        assert_eq!(out.values, s.values);
        assert_eq!(report.replaced, 0);
    }

    #[test]
    fn outlier_spike_replaced_by_lookback_mean() {
        let mut values = vec![1.0; 99];
        values.push(1000.0);
        let s = series(values);
        let (out, report) = replace_outliers(&s, 0.99, 12).unwrap();
        // threshold = 1 + 0.01 * 999 = 10.99; the spike becomes the mean of
        // the previous twelve ones.
        assert!((report.threshold - 10.99).abs() < 1e-9);
        assert_eq!(report.replaced, 1);
        assert_eq!(out.values[99], 1.0);
        let max = out.values.iter().cloned().fold(f64::MIN, f64::max);
        assert!(max <= report.threshold);
    }

    #[test]
    fn outlier_first_value_uses_threshold() {
        let mut values = vec![100.0];
        values.extend(vec![1.0; 99]);
        let s = series(values);
        let (out, report) = replace_outliers(&s, 0.5, 12).unwrap();
        assert_eq!(out.values[0], report.threshold);
    }

    #[test]
    fn merge_sums_siblings() {
        let text = "timestamp,household_id,bathroom1,bathroom2\n\
                    2020-01-01T00:00:00Z,h1,2,3\n\
                    2020-01-01T00:01:00Z,h1,2,\n\
                    2020-01-01T00:02:00Z,h1,,\n";
        let t = ingest_csv(text).unwrap();
        let mapping = vec![
            ("bathroom1".to_string(), "bathroom".to_string()),
            ("bathroom2".to_string(), "bathroom".to_string()),
        ];
        let merged = merge_categories(&t, &mapping);
        assert_eq!(merged.appliances, vec!["bathroom"]);
        assert_eq!(merged.rows[0].readings, vec![Some(5.0)]);
        assert_eq!(merged.rows[1].readings, vec![Some(2.0)]);
        assert_eq!(merged.rows[2].readings, vec![None]);
    }

    #[test]
    fn merge_unmapped_names_pass_through() {
        let text = "timestamp,household_id,ac\n2020-01-01T00:00:00Z,h1,1.5\n";
        let t = ingest_csv(text).unwrap();
        let merged = merge_categories(&t, &[]);
        assert_eq!(merged.appliances, vec!["ac"]);
        assert_eq!(merged.rows[0].readings, vec![Some(1.5)]);
    }

    #[test]
    fn aggregate_sums_households() {
        let text = "timestamp,household_id,ac\n\
                    2020-01-01T00:00:00Z,h1,1.5\n\
                    2020-01-01T00:00:00Z,h2,2.5\n\
                    2020-01-01T00:01:00Z,h1,1.0\n\
                    2020-01-01T00:01:00Z,h2,2.0\n";
        let t = ingest_csv(text).unwrap();
        let s = aggregate_households(&t, "ac").unwrap();
        assert_eq!(s.values, vec![4.0, 3.0]);
        assert_eq!(s.step, 60);
        assert_eq!(s.households, 2);
        assert!(aggregate_households(&t, "ev").is_err());
    }

    #[test]
    fn aggregate_single_household_is_identity() {
        let text = "timestamp,household_id,ac\n\
                    2020-01-01T00:00:00Z,h1,1.25\n\
                    2020-01-01T00:01:00Z,h1,0.75\n";
        let t = ingest_csv(text).unwrap();
        let s = aggregate_households(&t, "ac").unwrap();
        assert_eq!(s.values, vec![1.25, 0.75]);
    }

    #[test]
    fn aggregate_is_row_order_invariant() {
        let a = "timestamp,household_id,ac\n\
                 2020-01-01T00:00:00Z,h1,0.1\n\
                 2020-01-01T00:00:00Z,h2,0.2\n\
                 2020-01-01T00:00:00Z,h3,0.7\n";
        let b = "timestamp,household_id,ac\n\
                 2020-01-01T00:00:00Z,h3,0.7\n\
                 2020-01-01T00:00:00Z,h1,0.1\n\
                 2020-01-01T00:00:00Z,h2,0.2\n";
        let sa = aggregate_households(&ingest_csv(a).unwrap(), "ac").unwrap();
        let sb = aggregate_households(&ingest_csv(b).unwrap(), "ac").unwrap();
        assert_eq!(sa.values, sb.values);
    }

    #[test]
    fn resample_cases() {
        let s = series(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(resample(&s, 60).unwrap(), s);
        let r = resample(&s, 240).unwrap();
        assert_eq!(r.values, vec![2.5]);
        assert_eq!(r.step, 240);
        assert!(resample(&s, 90).is_err());

        let minutes = series((0..90).map(f64::from).collect());
        let q = resample(&minutes, 900).unwrap();
        assert_eq!(q.values.len(), 6);
    }

    #[test]
    fn normalizer_cases() {
        let s = series(vec![1.0, 2.0, 3.0]);
        let n = fit_normalizer(&s, false).unwrap();
        assert_eq!(n.mean, 2.0);
        assert_eq!(n.scale, 1.0);
        let applied = n.apply(&s);
        assert_eq!(applied.values, vec![-1.0, 0.0, 1.0]);
        assert_eq!(n.invert(&applied).values, s.values);
    }

    #[test]
    fn normalizer_std_flag() {
        let s = series(vec![0.0, 2.0]);
        let n = fit_normalizer(&s, true).unwrap();
        assert_eq!(n.mean, 1.0);
        assert_eq!(n.scale, 1.0); // population std of {0,2} is 1
        let c = fit_normalizer(&series(vec![5.0, 5.0]), true).unwrap();
        assert_eq!(c.scale, 1.0); // constant series falls back to 1
    }

    #[test]
    fn windows_enumeration() {
        let s = series(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let d = make_windows(&s, 3).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.windows[0], vec![1.0, 2.0, 3.0]);
        assert_eq!(d.targets[0], 4.0);
        assert_eq!(d.windows[1], vec![2.0, 3.0, 4.0]);
        assert_eq!(d.targets[1], 5.0);
        assert_eq!(d.timestamps, vec![s.timestamp_at(3), s.timestamp_at(4)]);
    }

    #[test]
    fn windows_boundary_and_overlap() {
        let s = series(vec![1.0, 2.0, 3.0, 4.0]);
        let d = make_windows(&s, 3).unwrap();
        assert_eq!(d.len(), 1);
        assert!(make_windows(&series(vec![1.0, 2.0, 3.0]), 3).is_err());

        let s = series((0..10).map(f64::from).collect());
        let d = make_windows(&s, 4).unwrap();
        for k in 1..d.len() {
            assert_eq!(d.windows[k][..3], d.windows[k - 1][1..]);
        }
    }

    #[test]
    fn windows_targets_reproduce_series_tail() {
        let s = series((0..20).map(|i| f64::from(i) * 0.5).collect());
        let d = make_windows(&s, 7).unwrap();
        assert_eq!(d.targets[..], s.values[7..]);
    }

    #[test]
    fn mapping_file_parsing() {
        let text = "# comment\nbathroom1=bathroom\n\nbathroom2 = bathroom\n";
        let m = parse_category_mapping(text).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[1], ("bathroom2".to_string(), "bathroom".to_string()));
        assert!(parse_category_mapping("no-equals-here\n").is_err());
    }
}
