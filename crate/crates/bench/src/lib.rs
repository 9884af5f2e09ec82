//! Benchmark-only crate; see `benches/forecasting.rs`.
//!
//! Shared helpers for building benchmark inputs live here so the bench
//! target stays small.

use alstlf_core::pipeline::TimeSeries;

/// Strictly daily-periodic series at 15-minute resolution, matching the
/// synthetic benchmark used in the acceptance experiments.
pub fn repetitive_series(days: usize) -> TimeSeries {
    let samples_per_day = 96;
    let values = (0..days * samples_per_day)
        .map(|t| {
            let m = t % samples_per_day;
            let phase = m as f64 / samples_per_day as f64;
            let mut v = 1.2
                + 0.5 * (std::f64::consts::TAU * phase).sin()
                + 0.2 * (2.0 * std::f64::consts::TAU * phase).sin();
            if (72..78).contains(&m) {
                v += 0.6;
            }
            if (30..34).contains(&m) {
                v += 0.3;
            }
            v
        })
        .collect();
    TimeSeries {
        start: 1_577_836_800,
        step: 900,
        values,
        label: "bench".into(),
        households: 20,
    }
}
