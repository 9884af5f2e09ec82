//! Feedforward error corrector.
//!
//! A two-layer network (ReLU hidden layer, linear output) learns the mapping
//! from input windows to the LSTM's forecast errors. Its prediction is added
//! to each raw forecast. The output layer is linear because residuals are
//! signed. Residuals live in the same normalized space the LSTM trains in;
//! corrections are applied before denormalization.
//!
//! Training reuses the Adam and global-norm clipping machinery from the
//! training module, and `update_corrector` supports the progressive refresh
//! scheme: as new forecast errors become observable they can be folded into
//! the corrector with a short fine-tuning run.

use crate::error::{Error, Result};
use crate::lstm::LstmParams;
use crate::numerics::{matvec, relu, seeded_uniform, Matrix, Rng, Vector};
use crate::pipeline::{timefmt, WindowedDataset};
use crate::training::{adam_step, clip_gradients, AdamState, TrainConfig};

/// Fine-tuning epochs used by progressive updates unless overridden.
pub const DEFAULT_UPDATE_EPOCHS: usize = 20;

/// Two-layer feedforward weights: hidden `w1` (width x window length) with
/// bias `b1`, then a linear readout `w2`, `b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorParams {
    pub w1: Matrix,
    pub b1: Vector,
    pub w2: Vector,
    pub b2: f64,
}

impl CorrectorParams {
    pub fn hidden_width(&self) -> usize {
        self.w1.rows()
    }

    pub fn window_len(&self) -> usize {
        self.w1.cols()
    }

    /// All-zero corrector: predicts zero error for every window, which makes
    /// the corrected forecast degenerate to the raw LSTM forecast.
    pub fn zeros(width: usize, window_len: usize) -> Self {
        CorrectorParams {
            w1: Matrix::zeros(width, window_len),
            b1: vec![0.0; width],
            w2: vec![0.0; width],
            b2: 0.0,
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w1.as_mut_slice(),
            &mut self.b1,
            &mut self.w2,
            std::slice::from_mut(&mut self.b2),
        ]
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        vec![
            self.w1.as_slice(),
            &self.b1,
            &self.w2,
            std::slice::from_ref(&self.b2),
        ]
    }
}

/// One observed forecast error: the input window that produced it, the
/// residual (actual minus LSTM prediction, normalized scale), and the
/// target's epoch timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRecord {
    pub window: Vector,
    pub residual: f64,
    pub timestamp: i64,
}

/// Random corrector init, mirroring the LSTM scheme: hidden weights uniform
/// in +/- sqrt(6 / (window + width)), readout uniform in +/- 1/sqrt(width),
/// biases zero.
pub fn init_corrector(rng: &mut Rng, width: usize, window_len: usize) -> Result<CorrectorParams> {
    if width == 0 {
        return Err(Error::ZeroDimension { what: "corrector width" });
    }
    if window_len == 0 {
        return Err(Error::ZeroDimension { what: "window length" });
    }
    let w1_bound = (6.0 / (window_len + width) as f64).sqrt();
    let w2_bound = 1.0 / (width as f64).sqrt();
    let w1 = Matrix::from_vec(
        width,
        window_len,
        seeded_uniform(rng, -w1_bound, w1_bound, width * window_len)?,
    );
    let w2 = seeded_uniform(rng, -w2_bound, w2_bound, width)?;
    Ok(CorrectorParams {
        w1,
        b1: vec![0.0; width],
        w2,
        b2: 0.0,
    })
}

/// Predicted forecast error for one window:
/// e_hat = w2 . relu(w1 window + b1) + b2.
pub fn corrector_forward(cp: &CorrectorParams, window: &[f64]) -> Result<f64> {
    if window.len() != cp.window_len() {
        return Err(Error::WindowLength {
            expected: cp.window_len(),
            got: window.len(),
        });
    }
    let mut z = matvec(&cp.w1, window)?;
    for (zk, &bk) in z.iter_mut().zip(&cp.b1) {
        *zk += bk;
    }
    let hidden = relu(&z);
    let mut out = cp.b2;
    for (&w, &h) in cp.w2.iter().zip(&hidden) {
        out += w * h;
    }
    Ok(out)
}

/// Squared-error loss and exact gradients for one record.
fn corrector_gradients(
    cp: &CorrectorParams,
    window: &[f64],
    residual: f64,
) -> Result<(f64, CorrectorParams)> {
    let mut z = matvec(&cp.w1, window)?;
    for (zk, &bk) in z.iter_mut().zip(&cp.b1) {
        *zk += bk;
    }
    let hidden = relu(&z);
    let mut out = cp.b2;
    for (&w, &h) in cp.w2.iter().zip(&hidden) {
        out += w * h;
    }
    let diff = out - residual;
    let loss = diff * diff;
    let d_out = 2.0 * diff;

    let mut grads = CorrectorParams::zeros(cp.hidden_width(), cp.window_len());
    for k in 0..cp.hidden_width() {
        grads.w2[k] = d_out * hidden[k];
        let dz = if z[k] > 0.0 { d_out * cp.w2[k] } else { 0.0 };
        grads.b1[k] = dz;
        for (j, &xj) in window.iter().enumerate() {
            grads.w1.set(k, j, dz * xj);
        }
    }
    grads.b2 = d_out;
    Ok((loss, grads))
}

fn fit(
    cp: &mut CorrectorParams,
    records: &[ResidualRecord],
    epochs: usize,
    cfg: &TrainConfig,
    rng: &mut Rng,
) -> Result<()> {
    let mut adam = AdamState::new_like(&cp.tensors());
    let mut order: Vec<usize> = (0..records.len()).collect();
    for epoch in 0..epochs {
        rng.shuffle(&mut order);
        for (batch_idx, batch) in order.chunks(cfg.batch_size.max(1)).enumerate() {
            let mut loss_sum = 0.0;
            let mut total = CorrectorParams::zeros(cp.hidden_width(), cp.window_len());
            for &i in batch {
                let r = &records[i];
                let (loss, grads) = corrector_gradients(cp, &r.window, r.residual)?;
                loss_sum += loss;
                for (acc, part) in total.tensors_mut().into_iter().zip(grads.tensors()) {
                    for (a, &p) in acc.iter_mut().zip(part) {
                        *a += p;
                    }
                }
            }
            if !loss_sum.is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    batch: batch_idx,
                });
            }
            let inv = 1.0 / batch.len() as f64;
            for t in total.tensors_mut() {
                for x in t {
                    *x *= inv;
                }
            }
            clip_gradients(&mut total.tensors_mut(), cfg.grad_threshold);
            adam_step(
                &mut cp.tensors_mut(),
                &total.tensors(),
                &mut adam,
                cfg.learning_rate,
            )?;
        }
    }
    Ok(())
}

/// Trains a fresh corrector of the given hidden width on residual records by
/// minimizing squared error. Deterministic per rng state.
pub fn train_corrector(
    records: &[ResidualRecord],
    width: usize,
    cfg: &TrainConfig,
    rng: &mut Rng,
) -> Result<CorrectorParams> {
    if records.is_empty() {
        return Err(Error::Empty { what: "residual records" });
    }
    let window_len = records[0].window.len();
    for r in records {
        if r.window.len() != window_len {
            return Err(Error::WindowLength {
                expected: window_len,
                got: r.window.len(),
            });
        }
    }
    let mut cp = init_corrector(rng, width, window_len)?;
    fit(&mut cp, records, cfg.max_epochs, cfg, rng)?;
    Ok(cp)
}

/// Runs the LSTM over every sample and records window, residual
/// (target minus prediction), and target timestamp.
pub fn collect_residuals(
    params: &LstmParams,
    data: &WindowedDataset,
) -> Result<Vec<ResidualRecord>> {
    let mut records = Vec::with_capacity(data.len());
    for k in 0..data.len() {
        let prediction = crate::lstm::predict_scalar_window(params, &data.windows[k])?;
        records.push(ResidualRecord {
            window: data.windows[k].clone(),
            residual: data.targets[k] - prediction,
            timestamp: data.timestamps[k],
        });
    }
    Ok(records)
}

/// The corrected forecast: raw prediction plus estimated error.
pub fn correct_prediction(p_hat: f64, e_hat: f64) -> f64 {
    p_hat + e_hat
}

/// Progressive refresh: fine-tunes an existing corrector on new records only,
/// for a short epoch count, with fresh Adam moments. Deterministic per seed.
pub fn update_corrector(
    cp: &CorrectorParams,
    new_records: &[ResidualRecord],
    epochs: usize,
    cfg: &TrainConfig,
    rng: &mut Rng,
) -> Result<CorrectorParams> {
    if new_records.is_empty() {
        return Err(Error::Empty { what: "residual records" });
    }
    for r in new_records {
        if r.window.len() != cp.window_len() {
            return Err(Error::WindowLength {
                expected: cp.window_len(),
                got: r.window.len(),
            });
        }
    }
    let mut updated = cp.clone();
    fit(&mut updated, new_records, epochs, cfg, rng)?;
    Ok(updated)
}

/// Serializes records as `timestamp,window_0..window_{tau-1},residual` CSV.
pub fn residuals_csv(records: &[ResidualRecord]) -> String {
    let tau = records.first().map_or(0, |r| r.window.len());
    let mut out = String::from("timestamp");
    for j in 0..tau {
        out.push_str(&format!(",window_{j}"));
    }
    out.push_str(",residual\n");
    for r in records {
        out.push_str(&timefmt::format_iso8601_utc(r.timestamp));
        for v in &r.window {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(",{}\n", r.residual));
    }
    out
}
