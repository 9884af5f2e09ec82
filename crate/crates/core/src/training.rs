//! Loss, backpropagation through time, gradient clipping, Adam, and the
//! epoch loop.
//!
//! Gradients are exact reverse-mode derivatives accumulated through the
//! cached forward trace. Batch gradients are the mean of per-sample
//! gradients, summed in sample-index order so results are bit-identical
//! no matter how many threads computed them.

use crate::error::{Error, Result};
use crate::lstm::{forward_sequence, init_params, zero_state, ForwardTrace, LstmParams};
use crate::numerics::{l2_norm, Rng, Vector};
use crate::pipeline::WindowedDataset;

/// Training hyperparameters. Defaults: 500 epochs, learning rate 1e-4,
/// gradient threshold 0.01, window length 12, 200 hidden units, batch 64.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub grad_threshold: f64,
    pub tau: usize,
    pub hidden_units: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_epochs: 500,
            learning_rate: 1e-4,
            grad_threshold: 0.01,
            tau: 12,
            hidden_units: 200,
            batch_size: 64,
            seed: 0,
        }
    }
}

/// Gradients mirror the parameter struct tensor-for-tensor.
pub type LstmGradients = LstmParams;

/// Adam accumulators, one pair of moment buffers per parameter tensor.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Vector>,
    v: Vec<Vector>,
    step: u64,
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

impl AdamState {
    /// Zero moments shaped like the given tensor set.
    pub fn new_like(tensors: &[&[f64]]) -> Self {
        AdamState {
            m: tensors.iter().map(|t| vec![0.0; t.len()]).collect(),
            v: tensors.iter().map(|t| vec![0.0; t.len()]).collect(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// Mean squared error over paired predictions and targets.
pub fn mse_loss(preds: &[f64], targets: &[f64]) -> Result<f64> {
    if preds.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: targets.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::Empty { what: "loss input" });
    }
    let sum: f64 = preds
        .iter()
        .zip(targets)
        .map(|(&p, &t)| (p - t) * (p - t))
        .sum();
    Ok(sum / preds.len() as f64)
}

/// Squared-error loss of one window and the exact gradients of every tensor
/// in `params`, by reverse accumulation through the forward trace.
pub fn bptt_gradients(
    params: &LstmParams,
    window: &[f64],
    target: f64,
) -> Result<(f64, LstmGradients)> {
    let hidden = params.hidden_size();
    let seq: Vec<Vector> = window.iter().map(|&v| vec![v]).collect();
    let trace = forward_sequence(params, &seq, &zero_state(hidden))?;
    let loss = (trace.prediction - target) * (trace.prediction - target);
    let grads = backward(params, &trace, target);
    Ok((loss, grads))
}

fn backward(params: &LstmParams, trace: &ForwardTrace, target: f64) -> LstmGradients {
    let hidden = params.hidden_size();
    let input = params.input_size();
    let steps = &trace.steps;
    let t_len = steps.len();
    let last = t_len - 1;

    let mut grads = LstmGradients::zeros(hidden, input);

    // Head: prediction = w_head . h_T + b_head, loss = (pred - target)^2.
    let d_pred = 2.0 * (trace.prediction - target);
    for k in 0..hidden {
        grads.w_head[k] = d_pred * steps[last].h[k];
    }
    grads.b_head = d_pred;

    let mut dh: Vector = params.w_head.iter().map(|&w| w * d_pred).collect();
    let mut dc = vec![0.0; hidden];
    let zero = vec![0.0; hidden];

    // Gate preactivation gradients for every step, row t at t*hidden. Weight
    // gradients are accumulated from these in one pass afterwards, which
    // touches each gradient entry once instead of once per step.
    let mut da_f = vec![0.0; t_len * hidden];
    let mut da_g = vec![0.0; t_len * hidden];
    let mut da_i = vec![0.0; t_len * hidden];
    let mut da_o = vec![0.0; t_len * hidden];

    for t in (0..t_len).rev() {
        let tr = &steps[t];
        let c_prev = if t == 0 { &zero } else { &steps[t - 1].c };
        let g = &tr.gates;
        let row = t * hidden;
        for k in 0..hidden {
            // h = o .* tanh(c)
            da_o[row + k] = dh[k] * tr.tanh_c[k] * g.o[k] * (1.0 - g.o[k]);
            dc[k] += dh[k] * g.o[k] * (1.0 - tr.tanh_c[k] * tr.tanh_c[k]);
            // c = f .* c_prev + i .* g
            da_f[row + k] = dc[k] * c_prev[k] * g.f[k] * (1.0 - g.f[k]);
            da_i[row + k] = dc[k] * g.g[k] * g.i[k] * (1.0 - g.i[k]);
            da_g[row + k] = dc[k] * g.i[k] * (1.0 - g.g[k] * g.g[k]);
        }

        // dh_prev = sum over gates of R^T da, row by row in fixed gate order.
        let mut dh_prev = vec![0.0; hidden];
        for k in 0..hidden {
            let (vf, vg, vi, vo) = (
                da_f[row + k],
                da_g[row + k],
                da_i[row + k],
                da_o[row + k],
            );
            let (rf, rg, ri, ro) = (
                &params.r_f.row(k)[..hidden],
                &params.r_g.row(k)[..hidden],
                &params.r_i.row(k)[..hidden],
                &params.r_o.row(k)[..hidden],
            );
            for j in 0..hidden {
                dh_prev[j] += rf[j] * vf + rg[j] * vg + ri[j] * vi + ro[j] * vo;
            }
        }
        dh = dh_prev;
        for k in 0..hidden {
            dc[k] *= g.f[k];
        }
    }

    // Input weights and biases: sum da_t x_t^T (and da_t) over steps.
    accumulate_input_grads(&mut grads.w_f, &mut grads.b_f, &da_f, steps, hidden, input);
    accumulate_input_grads(&mut grads.w_g, &mut grads.b_g, &da_g, steps, hidden, input);
    accumulate_input_grads(&mut grads.w_i, &mut grads.b_i, &da_i, steps, hidden, input);
    accumulate_input_grads(&mut grads.w_o, &mut grads.b_o, &da_o, steps, hidden, input);

    // Recurrent weights: sum da_t h_{t-1}^T; h_0 is zero so step 0 drops out.
    accumulate_recurrent_grads(&mut grads.r_f, &da_f, steps, hidden);
    accumulate_recurrent_grads(&mut grads.r_g, &da_g, steps, hidden);
    accumulate_recurrent_grads(&mut grads.r_i, &da_i, steps, hidden);
    accumulate_recurrent_grads(&mut grads.r_o, &da_o, steps, hidden);

    grads
}

fn accumulate_input_grads(
    w: &mut crate::numerics::Matrix,
    b: &mut [f64],
    da: &[f64],
    steps: &[crate::lstm::StepTrace],
    hidden: usize,
    input: usize,
) {
    for k in 0..hidden {
        for d in 0..input {
            let mut acc = 0.0;
            for (t, step) in steps.iter().enumerate() {
                acc += da[t * hidden + k] * step.x[d];
            }
            w.set(k, d, acc);
        }
        let mut acc = 0.0;
        for t in 0..steps.len() {
            acc += da[t * hidden + k];
        }
        b[k] = acc;
    }
}

fn accumulate_recurrent_grads(
    r: &mut crate::numerics::Matrix,
    da: &[f64],
    steps: &[crate::lstm::StepTrace],
    hidden: usize,
) {
    for k in 0..hidden {
        let row = &mut r.as_mut_slice()[k * hidden..(k + 1) * hidden];
        for t in 1..steps.len() {
            let v = da[t * hidden + k];
            let h_prev = &steps[t - 1].h[..hidden];
            for j in 0..hidden {
                row[j] += v * h_prev[j];
            }
        }
    }
}

/// Global-norm clipping: if the combined L2 norm of every tensor exceeds the
/// threshold, every entry is scaled so the norm equals the threshold.
/// Returns the pre-clip norm.
pub fn clip_gradients(tensors: &mut [&mut [f64]], threshold: f64) -> f64 {
    assert!(threshold > 0.0, "clip threshold must be positive");
    let norm = l2_norm(tensors.iter().map(|t| &**t));
    if norm > threshold {
        let scale = threshold / norm;
        for t in tensors.iter_mut() {
            for x in t.iter_mut() {
                *x *= scale;
            }
        }
    }
    norm
}

/// One Adam update over a tensor set:
/// m <- b1 m + (1-b1) g, v <- b2 v + (1-b2) g^2, bias-corrected, then
/// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
pub fn adam_step(
    params: &mut [&mut [f64]],
    grads: &[&[f64]],
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::LengthMismatch {
            left: params.len(),
            right: grads.len(),
        });
    }
    for ((p, g), (m, v)) in params
        .iter()
        .zip(grads)
        .zip(state.m.iter().zip(&state.v))
    {
        if p.len() != g.len() || p.len() != m.len() || p.len() != v.len() {
            return Err(Error::LengthMismatch {
                left: p.len(),
                right: g.len(),
            });
        }
    }
    state.step += 1;
    let bc1 = 1.0 - ADAM_BETA1.powi(state.step as i32);
    let bc2 = 1.0 - ADAM_BETA2.powi(state.step as i32);
    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        for k in 0..p.len() {
            m[k] = ADAM_BETA1 * m[k] + (1.0 - ADAM_BETA1) * g[k];
            v[k] = ADAM_BETA2 * v[k] + (1.0 - ADAM_BETA2) * g[k] * g[k];
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            p[k] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
    Ok(())
}

/// Mean loss and mean gradients over the indexed samples, folded in
/// sample-index order so the result is bit-stable.
pub fn batch_gradients(
    params: &LstmParams,
    data: &WindowedDataset,
    indices: &[usize],
) -> Result<(f64, LstmGradients)> {
    assert!(!indices.is_empty(), "empty batch");
    let mut loss_sum = 0.0;
    let mut total = LstmGradients::zeros(params.hidden_size(), params.input_size());
    for &i in indices {
        let (loss, grads) = bptt_gradients(params, &data.windows[i], data.targets[i])?;
        loss_sum += loss;
        for (acc, part) in total.tensors_mut().into_iter().zip(grads.tensors()) {
            for (a, &p) in acc.iter_mut().zip(part) {
                *a += p;
            }
        }
    }
    let inv = 1.0 / indices.len() as f64;
    for t in total.tensors_mut() {
        for x in t {
            *x *= inv;
        }
    }
    Ok((loss_sum * inv, total))
}

/// Trains the LSTM with shuffled mini-batches, global-norm clipping, and
/// Adam. Returns the final parameters and the per-epoch mean loss history.
/// Deterministic for a fixed (data, config, rng state).
pub fn train_lstm(
    data: &WindowedDataset,
    cfg: &TrainConfig,
    rng: &mut Rng,
) -> Result<(LstmParams, Vec<f64>)> {
    if data.is_empty() {
        return Err(Error::Empty { what: "training dataset" });
    }
    if data.tau != cfg.tau {
        return Err(Error::WindowLength {
            expected: cfg.tau,
            got: data.tau,
        });
    }
    let mut params = init_params(rng, cfg.hidden_units, 1)?;
    let mut adam = AdamState::new_like(&params.tensors());
    let n = data.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(cfg.max_epochs);

    for epoch in 0..cfg.max_epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for (batch_idx, batch) in order.chunks(cfg.batch_size.max(1)).enumerate() {
            let (loss, mut grads) = batch_gradients(&params, data, batch)?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    batch: batch_idx,
                });
            }
            epoch_loss += loss * batch.len() as f64;
            clip_gradients(&mut grads.tensors_mut(), cfg.grad_threshold);
            adam_step(
                &mut params.tensors_mut(),
                &grads.tensors(),
                &mut adam,
                cfg.learning_rate,
            )?;
        }
        history.push(epoch_loss / n as f64);
    }
    Ok((params, history))
}

/// Serializes the history as `epoch,mean_loss` CSV lines.
pub fn history_csv(history: &[f64]) -> String {
    let mut out = String::from("epoch,mean_loss\n");
    for (epoch, loss) in history.iter().enumerate() {
        out.push_str(&format!("{},{}\n", epoch, loss));
    }
    out
}
