//! The LSTM unit and the sequence-to-one forward pass.
//!
//! A step computes the forget/candidate/input/output gates from the input and
//! the previous hidden state, updates the cell state, and filters it through
//! tanh and the output gate. A fully connected regression head maps the final
//! hidden state to a scalar prediction.

use crate::error::{Error, Result};
use crate::numerics::{hadamard, seeded_uniform, tanh_act, Matrix, Rng, Vector};

/// All weights of one LSTM unit plus the scalar regression head.
///
/// `w_*` are hidden-by-input weights, `r_*` hidden-by-hidden recurrent
/// weights, `b_*` per-gate biases. `w_head`/`b_head` form the affine
/// regression layer applied to the final hidden state.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub w_f: Matrix,
    pub w_g: Matrix,
    pub w_i: Matrix,
    pub w_o: Matrix,
    pub r_f: Matrix,
    pub r_g: Matrix,
    pub r_i: Matrix,
    pub r_o: Matrix,
    pub b_f: Vector,
    pub b_g: Vector,
    pub b_i: Vector,
    pub b_o: Vector,
    pub w_head: Vector,
    pub b_head: f64,
}

impl LstmParams {
    pub fn hidden_size(&self) -> usize {
        self.w_f.rows()
    }

    pub fn input_size(&self) -> usize {
        self.w_f.cols()
    }

    /// All-zero parameters, useful as a fixed point in tests.
    pub fn zeros(hidden: usize, input: usize) -> Self {
        LstmParams {
            w_f: Matrix::zeros(hidden, input),
            w_g: Matrix::zeros(hidden, input),
            w_i: Matrix::zeros(hidden, input),
            w_o: Matrix::zeros(hidden, input),
            r_f: Matrix::zeros(hidden, hidden),
            r_g: Matrix::zeros(hidden, hidden),
            r_i: Matrix::zeros(hidden, hidden),
            r_o: Matrix::zeros(hidden, hidden),
            b_f: vec![0.0; hidden],
            b_g: vec![0.0; hidden],
            b_i: vec![0.0; hidden],
            b_o: vec![0.0; hidden],
            w_head: vec![0.0; hidden],
            b_head: 0.0,
        }
    }

    /// Parameter tensors as mutable slices, in a fixed documented order:
    /// w_f, w_g, w_i, w_o, r_f, r_g, r_i, r_o, b_f, b_g, b_i, b_o, w_head, b_head.
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w_f.as_mut_slice(),
            self.w_g.as_mut_slice(),
            self.w_i.as_mut_slice(),
            self.w_o.as_mut_slice(),
            self.r_f.as_mut_slice(),
            self.r_g.as_mut_slice(),
            self.r_i.as_mut_slice(),
            self.r_o.as_mut_slice(),
            &mut self.b_f,
            &mut self.b_g,
            &mut self.b_i,
            &mut self.b_o,
            &mut self.w_head,
            std::slice::from_mut(&mut self.b_head),
        ]
    }

    /// Immutable view of the same tensors in the same order as `tensors_mut`.
    pub fn tensors(&self) -> Vec<&[f64]> {
        vec![
            self.w_f.as_slice(),
            self.w_g.as_slice(),
            self.w_i.as_slice(),
            self.w_o.as_slice(),
            self.r_f.as_slice(),
            self.r_g.as_slice(),
            self.r_i.as_slice(),
            self.r_o.as_slice(),
            &self.b_f,
            &self.b_g,
            &self.b_i,
            &self.b_o,
            &self.w_head,
            std::slice::from_ref(&self.b_head),
        ]
    }
}

/// Hidden and cell state carried between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vector,
    pub c: Vector,
}

/// Zero initial state; windows are treated as independent sequences.
pub fn zero_state(hidden: usize) -> LstmState {
    assert!(hidden >= 1, "hidden size must be >= 1");
    LstmState {
        h: vec![0.0; hidden],
        c: vec![0.0; hidden],
    }
}

/// Gate activations of one step, kept for backpropagation through time.
#[derive(Debug, Clone)]
pub struct Gates {
    pub f: Vector,
    pub g: Vector,
    pub i: Vector,
    pub o: Vector,
}

/// Everything one step produced: input, gates, and the new states.
#[derive(Debug, Clone)]
pub struct StepTrace {
    pub x: Vector,
    pub gates: Gates,
    pub c: Vector,
    pub tanh_c: Vector,
    pub h: Vector,
}

/// Forward pass over a whole window, with the per-step cache.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub steps: Vec<StepTrace>,
    pub prediction: f64,
}

/// Random initialization: input weights uniform in +/- sqrt(6 / (input + hidden)),
/// recurrent and head weights uniform in +/- 1/sqrt(hidden), forget bias all
/// ones, remaining biases zero. Deterministic per rng state.
pub fn init_params(rng: &mut Rng, hidden: usize, input: usize) -> Result<LstmParams> {
    if hidden == 0 {
        return Err(Error::ZeroDimension { what: "hidden size" });
    }
    if input == 0 {
        return Err(Error::ZeroDimension { what: "input size" });
    }
    let w_bound = (6.0 / (input + hidden) as f64).sqrt();
    let r_bound = 1.0 / (hidden as f64).sqrt();
    let draw_matrix = |rng: &mut Rng, rows: usize, cols: usize, bound: f64| -> Result<Matrix> {
        let data = seeded_uniform(rng, -bound, bound, rows * cols)?;
        Ok(Matrix::from_vec(rows, cols, data))
    };
    // Draw order is fixed: the four input weights, the four recurrent
    // weights, then the head. Changing it would change every seeded run.
    let w_f = draw_matrix(rng, hidden, input, w_bound)?;
    let w_g = draw_matrix(rng, hidden, input, w_bound)?;
    let w_i = draw_matrix(rng, hidden, input, w_bound)?;
    let w_o = draw_matrix(rng, hidden, input, w_bound)?;
    let r_f = draw_matrix(rng, hidden, hidden, r_bound)?;
    let r_g = draw_matrix(rng, hidden, hidden, r_bound)?;
    let r_i = draw_matrix(rng, hidden, hidden, r_bound)?;
    let r_o = draw_matrix(rng, hidden, hidden, r_bound)?;
    let w_head = seeded_uniform(rng, -r_bound, r_bound, hidden)?;
    Ok(LstmParams {
        w_f,
        w_g,
        w_i,
        w_o,
        r_f,
        r_g,
        r_i,
        r_o,
        b_f: vec![1.0; hidden],
        b_g: vec![0.0; hidden],
        b_i: vec![0.0; hidden],
        b_o: vec![0.0; hidden],
        w_head,
        b_head: 0.0,
    })
}

/// The four gate preactivations in one pass. For each unit the sum starts
/// at the bias, adds the input-weight terms left to right, then the
/// recurrent terms left to right; the four gates advance together so their
/// dependency chains interleave.
fn gate_preactivations(
    params: &LstmParams,
    x: &[f64],
    h_prev: &[f64],
) -> (Vector, Vector, Vector, Vector) {
    let hidden = params.hidden_size();
    let mut af = Vec::with_capacity(hidden);
    let mut ag = Vec::with_capacity(hidden);
    let mut ai = Vec::with_capacity(hidden);
    let mut ao = Vec::with_capacity(hidden);
    for k in 0..hidden {
        let mut f = params.b_f[k];
        let mut g = params.b_g[k];
        let mut i = params.b_i[k];
        let mut o = params.b_o[k];
        let (wf, wg, wi, wo) = (
            params.w_f.row(k),
            params.w_g.row(k),
            params.w_i.row(k),
            params.w_o.row(k),
        );
        for (j, &xj) in x.iter().enumerate() {
            f += wf[j] * xj;
            g += wg[j] * xj;
            i += wi[j] * xj;
            o += wo[j] * xj;
        }
        let n = h_prev.len();
        let (rf, rg, ri, ro) = (
            &params.r_f.row(k)[..n],
            &params.r_g.row(k)[..n],
            &params.r_i.row(k)[..n],
            &params.r_o.row(k)[..n],
        );
        for (j, &hj) in h_prev.iter().enumerate() {
            f += rf[j] * hj;
            g += rg[j] * hj;
            i += ri[j] * hj;
            o += ro[j] * hj;
        }
        af.push(f);
        ag.push(g);
        ai.push(i);
        ao.push(o);
    }
    (af, ag, ai, ao)
}

fn step_core(
    params: &LstmParams,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
) -> (Gates, Vector, Vector, Vector) {
    let (mut f, mut g, mut i, mut o) = gate_preactivations(params, x, h_prev);
    for v in f.iter_mut() {
        *v = crate::numerics::sigmoid_scalar(*v);
    }
    for v in g.iter_mut() {
        *v = v.tanh();
    }
    for v in i.iter_mut() {
        *v = crate::numerics::sigmoid_scalar(*v);
    }
    for v in o.iter_mut() {
        *v = crate::numerics::sigmoid_scalar(*v);
    }
    let hidden = f.len();
    let mut c = Vec::with_capacity(hidden);
    for k in 0..hidden {
        c.push(f[k] * c_prev[k] + i[k] * g[k]);
    }
    let tanh_c = tanh_act(&c);
    let h = hadamard(&o, &tanh_c).expect("equal lengths by construction");
    (Gates { f, g, i, o }, c, tanh_c, h)
}

/// One LSTM step:
///
/// f = sigmoid(Wf x + Rf h + bf)      g = tanh(Wg x + Rg h + bg)
/// i = sigmoid(Wi x + Ri h + bi)      o = sigmoid(Wo x + Ro h + bo)
/// c = f .* c_prev + i .* g           h = o .* tanh(c)
pub fn lstm_step(params: &LstmParams, prev: &LstmState, x: &[f64]) -> Result<(LstmState, Gates)> {
    if x.len() != params.input_size() {
        return Err(Error::MatVecShape {
            rows: params.hidden_size(),
            cols: params.input_size(),
            vec_len: x.len(),
        });
    }
    if prev.h.len() != params.hidden_size() || prev.c.len() != params.hidden_size() {
        return Err(Error::LengthMismatch {
            left: prev.h.len(),
            right: params.hidden_size(),
        });
    }
    let (gates, c, _, h) = step_core(params, x, &prev.h, &prev.c);
    Ok((LstmState { h, c }, gates))
}

/// Runs the unit over a window from `start` and applies the regression head
/// to the final hidden state. The trace caches every step for BPTT.
pub fn forward_sequence(
    params: &LstmParams,
    window: &[Vector],
    start: &LstmState,
) -> Result<ForwardTrace> {
    if window.is_empty() {
        return Err(Error::Empty { what: "input window" });
    }
    if start.h.len() != params.hidden_size() || start.c.len() != params.hidden_size() {
        return Err(Error::LengthMismatch {
            left: start.h.len(),
            right: params.hidden_size(),
        });
    }
    let mut steps: Vec<StepTrace> = Vec::with_capacity(window.len());
    for x in window {
        if x.len() != params.input_size() {
            return Err(Error::MatVecShape {
                rows: params.hidden_size(),
                cols: params.input_size(),
                vec_len: x.len(),
            });
        }
        let (h_prev, c_prev) = match steps.last() {
            Some(prev) => (&prev.h, &prev.c),
            None => (&start.h, &start.c),
        };
        let (gates, c, tanh_c, h) = step_core(params, x, h_prev, c_prev);
        steps.push(StepTrace {
            x: x.clone(),
            gates,
            c,
            tanh_c,
            h,
        });
    }
    let final_h = &steps.last().expect("non-empty window").h;
    let mut prediction = params.b_head;
    for (&w, &h) in params.w_head.iter().zip(final_h) {
        prediction += w * h;
    }
    Ok(ForwardTrace { steps, prediction })
}

/// Convenience wrapper: forward pass from the zero state on a scalar window.
pub fn predict_scalar_window(params: &LstmParams, window: &[f64]) -> Result<f64> {
    let seq: Vec<Vector> = window.iter().map(|&v| vec![v]).collect();
    let trace = forward_sequence(params, &seq, &zero_state(params.hidden_size()))?;
    Ok(trace.prediction)
}
