//! MAPE, naive baselines, one-step and recursive evaluation, and the
//! comparison table.
//!
//! MAPE is undefined at zero actuals (aggregated EV consumption sits at or
//! near zero for long stretches), so points with |actual| <= eps are excluded
//! from the mean and counted in the report. This changes headline numbers;
//! the exclusion count is always carried alongside.

use crate::corrector::{corrector_forward, CorrectorParams};
use crate::error::{Error, Result};
use crate::lstm::{forward_sequence, zero_state, LstmParams};
use crate::numerics::Vector;
use crate::pipeline::{timefmt, Normalizer, WindowedDataset};

/// Default zero-actual exclusion threshold, in kW.
pub const MAPE_EPS: f64 = 1e-6;

/// Per-appliance evaluation outcome: aligned actuals and predictions (kW,
/// denormalized) plus both MAPE figures.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastReport {
    pub label: String,
    pub timestamps: Vec<i64>,
    pub actual: Vector,
    pub lstm_pred: Vector,
    pub corrected_pred: Vector,
    pub mape_lstm: f64,
    pub mape_corrected: f64,
    pub excluded_zero_points: usize,
}

/// Mean of 100*|y - y_hat| / |y| over points with |y| > eps. Returns the
/// percentage and how many points were excluded as (near-)zero actuals.
pub fn mape(actual: &[f64], pred: &[f64], eps: f64) -> Result<(f64, usize)> {
    if actual.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: pred.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Empty { what: "mape input" });
    }
    let mut sum = 0.0;
    let mut used = 0usize;
    for (&y, &y_hat) in actual.iter().zip(pred) {
        if y.abs() > eps {
            sum += 100.0 * ((y - y_hat) / y).abs();
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::AllExcluded {
            n: actual.len(),
            eps,
        });
    }
    Ok((sum / used as f64, actual.len() - used))
}

/// Persistence baseline: the forecast for each test point is the previous
/// observed value. Predictions align with `series[split..]`.
pub fn baseline_persistence(series: &[f64], split: usize) -> Vector {
    assert!(split >= 1 && split < series.len(), "test range empty");
    series[split - 1..series.len() - 1].to_vec()
}

/// Seasonal-naive baseline: the forecast is the value one period earlier.
pub fn baseline_seasonal(series: &[f64], split: usize, period: usize) -> Result<Vector> {
    assert!(split < series.len(), "test range empty");
    if period == 0 || split < period {
        return Err(Error::InsufficientHistory {
            period,
            available: split,
        });
    }
    Ok(series[split - period..series.len() - period].to_vec())
}

/// One-step evaluation over a windowed test set: for every sample the raw
/// LSTM prediction and the corrector's estimated error are combined, then
/// everything is denormalized to kW before MAPE.
pub fn evaluate_one_step(
    label: &str,
    lstm: &LstmParams,
    corr: &CorrectorParams,
    test: &WindowedDataset,
    norm: &Normalizer,
) -> Result<ForecastReport> {
    if test.is_empty() {
        return Err(Error::Empty { what: "test dataset" });
    }
    let hidden = lstm.hidden_size();
    let mut actual = Vec::with_capacity(test.len());
    let mut lstm_pred = Vec::with_capacity(test.len());
    let mut corrected_pred = Vec::with_capacity(test.len());
    for k in 0..test.len() {
        let window = &test.windows[k];
        let seq: Vec<Vector> = window.iter().map(|&v| vec![v]).collect();
        let p_hat = forward_sequence(lstm, &seq, &zero_state(hidden))?.prediction;
        let e_hat = corrector_forward(corr, window)?;
        let y_hat = crate::corrector::correct_prediction(p_hat, e_hat);
        actual.push(norm.invert_value(test.targets[k]));
        lstm_pred.push(norm.invert_value(p_hat));
        corrected_pred.push(norm.invert_value(y_hat));
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

/// Recursive multi-step forecast: predicts one step, applies the error
/// correction, appends the corrected value to the window, and repeats.
/// The seed window is in kW; returned predictions are in kW.
pub fn forecast_recursive(
    lstm: &LstmParams,
    corr: &CorrectorParams,
    seed_window: &[f64],
    steps: usize,
    norm: &Normalizer,
) -> Result<Vector> {
    let mut window: Vector = seed_window.iter().map(|&v| norm.apply_value(v)).collect();
    let hidden = lstm.hidden_size();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let seq: Vec<Vector> = window.iter().map(|&v| vec![v]).collect();
        let p_hat = forward_sequence(lstm, &seq, &zero_state(hidden))?.prediction;
        let e_hat = corrector_forward(corr, &window)?;
        let y_hat = crate::corrector::correct_prediction(p_hat, e_hat);
        out.push(norm.invert_value(y_hat));
        window.remove(0);
        window.push(y_hat);
    }
    Ok(out)
}

/// One appliance's evaluation plus its baseline predictions over the same
/// test range, everything in kW and aligned index-for-index.
#[derive(Debug, Clone)]
pub struct ApplianceEvaluation {
    pub report: ForecastReport,
    pub persistence_pred: Vector,
    pub seasonal_pred: Vector,
}

/// Comparison table:
/// `appliance,mape_persistence,mape_seasonal,mape_lstm,mape_proposed`, one
/// row per appliance. With two or more appliances a `Total` row is appended,
/// computed on the element-wise sum of the series (not the mean of MAPEs).
pub fn compare_report(evals: &[ApplianceEvaluation]) -> Result<String> {
    if evals.is_empty() {
        return Err(Error::Empty { what: "comparison input" });
    }
    let mut out = String::from("appliance,mape_persistence,mape_seasonal,mape_lstm,mape_proposed\n");
    for e in evals {
        let n = e.report.actual.len();
        if e.persistence_pred.len() != n || e.seasonal_pred.len() != n {
            return Err(Error::LengthMismatch {
                left: e.persistence_pred.len(),
                right: n,
            });
        }
        let (mp, _) = mape(&e.report.actual, &e.persistence_pred, MAPE_EPS)?;
        let (ms, _) = mape(&e.report.actual, &e.seasonal_pred, MAPE_EPS)?;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.report.label, mp, ms, e.report.mape_lstm, e.report.mape_corrected
        ));
    }
    if evals.len() >= 2 {
        let n = evals[0].report.actual.len();
        for e in evals {
            if e.report.actual.len() != n {
                return Err(Error::LengthMismatch {
                    left: e.report.actual.len(),
                    right: n,
                });
            }
        }
        let sum_of = |f: &dyn Fn(&ApplianceEvaluation) -> &Vector| -> Vector {
            let mut total = vec![0.0; n];
            for e in evals {
                for (t, &v) in total.iter_mut().zip(f(e)) {
                    *t += v;
                }
            }
            total
        };
        let actual = sum_of(&|e| &e.report.actual);
        let persistence = sum_of(&|e| &e.persistence_pred);
        let seasonal = sum_of(&|e| &e.seasonal_pred);
        let lstm = sum_of(&|e| &e.report.lstm_pred);
        let corrected = sum_of(&|e| &e.report.corrected_pred);
        let (mp, _) = mape(&actual, &persistence, MAPE_EPS)?;
        let (ms, _) = mape(&actual, &seasonal, MAPE_EPS)?;
        let (ml, _) = mape(&actual, &lstm, MAPE_EPS)?;
        let (mc, _) = mape(&actual, &corrected, MAPE_EPS)?;
        out.push_str(&format!("Total,{},{},{},{}\n", mp, ms, ml, mc));
    }
    Ok(out)
}

/// Serializes a report as
/// `timestamp,actual,lstm_pred,corrected_pred,predicted_residual` CSV. The
/// residual column is corrected minus raw, so the identity of the correction
/// step holds row by row.
pub fn predictions_csv(report: &ForecastReport) -> String {
    let mut out = String::from("timestamp,actual,lstm_pred,corrected_pred,predicted_residual\n");
    for k in 0..report.actual.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            timefmt::format_iso8601_utc(report.timestamps[k]),
            report.actual[k],
            report.lstm_pred[k],
            report.corrected_pred[k],
            report.corrected_pred[k] - report.lstm_pred[k],
        ));
    }
    out
}

/// Plot-ready CSV of actuals against both predictions.
pub fn plot_csv(report: &ForecastReport) -> String {
    let mut out = String::from("timestamp,actual,lstm_pred,corrected_pred\n");
    for k in 0..report.actual.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            timefmt::format_iso8601_utc(report.timestamps[k]),
            report.actual[k],
            report.lstm_pred[k],
            report.corrected_pred[k],
        ));
    }
    out
}
