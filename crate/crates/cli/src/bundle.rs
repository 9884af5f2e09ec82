//! Versioned text model format (`ALSTLF-MODEL v1`).
//!
//! All 64-bit values are written as decimals with 17 significant digits, so
//! save -> load -> save round-trips bit for bit and files diff cleanly across
//! platforms and implementations. Tensors appear in a fixed order; a trailing
//! `end` line guards against truncation.

use alstlf_core::numerics::Matrix;
use alstlf_core::{CorrectorParams, LstmParams, Normalizer};
use anyhow::{bail, Context, Result};

pub const FORMAT_VERSION: &str = "ALSTLF-MODEL v1";

/// Everything needed to reproduce predictions: dimensions, the training
/// seed, the normalizer, and both networks.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub tau: usize,
    pub hidden: usize,
    pub input: usize,
    pub corrector_width: usize,
    pub seed: u64,
    pub normalizer: Normalizer,
    pub lstm: LstmParams,
    pub corrector: CorrectorParams,
}

fn push_f64(out: &mut String, v: f64) {
    out.push_str(&format!("{v:.16e}"));
}

fn push_matrix(out: &mut String, name: &str, m: &Matrix) {
    out.push_str(&format!("matrix {name} {} {}\n", m.rows(), m.cols()));
    for i in 0..m.rows() {
        let row = m.row(i);
        for (j, &v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            push_f64(out, v);
        }
        out.push('\n');
    }
}

fn push_vector(out: &mut String, name: &str, v: &[f64]) {
    out.push_str(&format!("vector {name} {}\n", v.len()));
    for (j, &x) in v.iter().enumerate() {
        if j > 0 {
            out.push(' ');
        }
        push_f64(out, x);
    }
    out.push('\n');
}

fn push_scalar(out: &mut String, name: &str, v: f64) {
    out.push_str(&format!("scalar {name}\n"));
    push_f64(out, v);
    out.push('\n');
}

/// Serializes a bundle to the v1 text format.
pub fn save_bundle(bundle: &ModelBundle) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_VERSION);
    out.push('\n');
    out.push_str(&format!("tau {}\n", bundle.tau));
    out.push_str(&format!("hidden {}\n", bundle.hidden));
    out.push_str(&format!("input {}\n", bundle.input));
    out.push_str(&format!("corrector_width {}\n", bundle.corrector_width));
    out.push_str(&format!("seed {}\n", bundle.seed));
    out.push_str("normalizer\n");
    push_f64(&mut out, bundle.normalizer.mean);
    out.push(' ');
    push_f64(&mut out, bundle.normalizer.scale);
    out.push('\n');

    let l = &bundle.lstm;
    push_matrix(&mut out, "w_f", &l.w_f);
    push_matrix(&mut out, "w_g", &l.w_g);
    push_matrix(&mut out, "w_i", &l.w_i);
    push_matrix(&mut out, "w_o", &l.w_o);
    push_matrix(&mut out, "r_f", &l.r_f);
    push_matrix(&mut out, "r_g", &l.r_g);
    push_matrix(&mut out, "r_i", &l.r_i);
    push_matrix(&mut out, "r_o", &l.r_o);
    push_vector(&mut out, "b_f", &l.b_f);
    push_vector(&mut out, "b_g", &l.b_g);
    push_vector(&mut out, "b_i", &l.b_i);
    push_vector(&mut out, "b_o", &l.b_o);
    push_vector(&mut out, "w_head", &l.w_head);
    push_scalar(&mut out, "b_head", l.b_head);

    let c = &bundle.corrector;
    push_matrix(&mut out, "c_w1", &c.w1);
    push_vector(&mut out, "c_b1", &c.b1);
    push_vector(&mut out, "c_w2", &c.w2);
    push_scalar(&mut out, "c_b2", c.b2);
    out.push_str("end\n");
    out
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        match self.lines.next() {
            Some((idx, line)) => Ok((idx + 1, line.trim_end_matches('\r'))),
            None => bail!("unexpected end of file"),
        }
    }

    fn expect_kv(&mut self, key: &str) -> Result<String> {
        let (n, line) = self.next_line()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.to_string()),
            _ => bail!("line {n}: expected `{key} <value>`, got {line:?}"),
        }
    }

    fn parse_floats(&mut self, expect: usize) -> Result<Vec<f64>> {
        let (n, line) = self.next_line()?;
        let mut out = Vec::with_capacity(expect);
        for tok in line.split(' ') {
            let v: f64 = tok
                .parse()
                .with_context(|| format!("line {n}: bad float {tok:?}"))?;
            if !v.is_finite() {
                bail!("line {n}: non-finite value {tok:?}");
            }
            out.push(v);
        }
        if out.len() != expect {
            bail!("line {n}: expected {expect} values, got {}", out.len());
        }
        Ok(out)
    }

    fn matrix(&mut self, name: &str, rows: usize, cols: usize) -> Result<Matrix> {
        let (n, line) = self.next_line()?;
        let expect = format!("matrix {name} {rows} {cols}");
        if line != expect {
            bail!("line {n}: expected `{expect}`, got {line:?}");
        }
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            data.extend(self.parse_floats(cols)?);
        }
        Ok(Matrix::from_vec(rows, cols, data))
    }

    fn vector(&mut self, name: &str, len: usize) -> Result<Vec<f64>> {
        let (n, line) = self.next_line()?;
        let expect = format!("vector {name} {len}");
        if line != expect {
            bail!("line {n}: expected `{expect}`, got {line:?}");
        }
        self.parse_floats(len)
    }

    fn scalar(&mut self, name: &str) -> Result<f64> {
        let (n, line) = self.next_line()?;
        let expect = format!("scalar {name}");
        if line != expect {
            bail!("line {n}: expected `{expect}`, got {line:?}");
        }
        Ok(self.parse_floats(1)?[0])
    }
}

/// Parses the v1 text format, validating the version line, every dimension,
/// and the trailing `end` marker before returning a bundle.
pub fn load_bundle(text: &str) -> Result<ModelBundle> {
    let mut r = Reader {
        lines: text.lines().enumerate(),
    };
    let (n, version) = r.next_line()?;
    if version != FORMAT_VERSION {
        bail!("line {n}: unrecognized model format {version:?} (expected {FORMAT_VERSION:?})");
    }
    let tau: usize = r.expect_kv("tau")?.parse().context("tau")?;
    let hidden: usize = r.expect_kv("hidden")?.parse().context("hidden")?;
    let input: usize = r.expect_kv("input")?.parse().context("input")?;
    let corrector_width: usize = r
        .expect_kv("corrector_width")?
        .parse()
        .context("corrector_width")?;
    let seed: u64 = r.expect_kv("seed")?.parse().context("seed")?;
    if tau == 0 || hidden == 0 || input == 0 || corrector_width == 0 {
        bail!("dimensions must all be at least 1");
    }
    let (n, line) = r.next_line()?;
    if line != "normalizer" {
        bail!("line {n}: expected `normalizer`, got {line:?}");
    }
    let norm = r.parse_floats(2)?;

    let lstm = LstmParams {
        w_f: r.matrix("w_f", hidden, input)?,
        w_g: r.matrix("w_g", hidden, input)?,
        w_i: r.matrix("w_i", hidden, input)?,
        w_o: r.matrix("w_o", hidden, input)?,
        r_f: r.matrix("r_f", hidden, hidden)?,
        r_g: r.matrix("r_g", hidden, hidden)?,
        r_i: r.matrix("r_i", hidden, hidden)?,
        r_o: r.matrix("r_o", hidden, hidden)?,
        b_f: r.vector("b_f", hidden)?,
        b_g: r.vector("b_g", hidden)?,
        b_i: r.vector("b_i", hidden)?,
        b_o: r.vector("b_o", hidden)?,
        w_head: r.vector("w_head", hidden)?,
        b_head: r.scalar("b_head")?,
    };
    let corrector = CorrectorParams {
        w1: r.matrix("c_w1", corrector_width, tau)?,
        b1: r.vector("c_b1", corrector_width)?,
        w2: r.vector("c_w2", corrector_width)?,
        b2: r.scalar("c_b2")?,
    };
    let (n, line) = r.next_line()?;
    if line != "end" {
        bail!("line {n}: expected `end`, got {line:?}");
    }
    Ok(ModelBundle {
        tau,
        hidden,
        input,
        corrector_width,
        seed,
        normalizer: Normalizer {
            mean: norm[0],
            scale: norm[1],
        },
        lstm,
        corrector,
    })
}
