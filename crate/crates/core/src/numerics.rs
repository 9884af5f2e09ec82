//! Dense linear algebra, activations, and seeded randomness.
//!
//! Everything here is deterministic: operations are pure, summations run in a
//! fixed left-to-right order, and [`Rng`] produces bit-identical streams for
//! identical seeds on every platform.

use crate::error::{Error, Result};

/// A dense vector of 64-bit floats.
pub type Vector = Vec<f64>;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix. Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major data. Panics on a size mismatch.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// y = M^T x, used by reverse-mode accumulation.
    pub fn transpose_matvec(&self, v: &[f64]) -> Result<Vector> {
        if v.len() != self.rows {
            return Err(Error::MatVecShape {
                rows: self.rows,
                cols: self.cols,
                vec_len: v.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            let row = self.row(i);
            for (o, &m) in out.iter_mut().zip(row) {
                *o += m * vi;
            }
        }
        Ok(out)
    }

    /// self += a * b^T (outer-product accumulation).
    pub fn add_outer(&mut self, a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), self.rows);
        assert_eq!(b.len(), self.cols);
        for (i, &ai) in a.iter().enumerate() {
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (r, &bj) in row.iter_mut().zip(b) {
                *r += ai * bj;
            }
        }
    }
}

/// Matrix-vector product; each output entry is a left-to-right dot product.
pub fn matvec(m: &Matrix, v: &[f64]) -> Result<Vector> {
    if m.cols != v.len() {
        return Err(Error::MatVecShape {
            rows: m.rows,
            cols: m.cols,
            vec_len: v.len(),
        });
    }
    let mut out = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let mut acc = 0.0;
        for (&mij, &vj) in m.row(i).iter().zip(v) {
            acc += mij * vj;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Elementwise product of two equally sized vectors.
pub fn hadamard(a: &[f64], b: &[f64]) -> Result<Vector> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| x * y).collect())
}

/// Logistic sigmoid, elementwise. Saturates smoothly for large |x|.
pub fn sigmoid(v: &[f64]) -> Vector {
    v.iter().map(|&x| sigmoid_scalar(x)).collect()
}

pub fn sigmoid_scalar(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Hyperbolic tangent, elementwise.
pub fn tanh_act(v: &[f64]) -> Vector {
    v.iter().map(|&x| x.tanh()).collect()
}

/// Rectified linear unit, elementwise.
pub fn relu(v: &[f64]) -> Vector {
    v.iter().map(|&x| x.max(0.0)).collect()
}

/// Global L2 norm over every element of every slice, in argument order.
pub fn l2_norm<'a, I>(parts: I) -> f64
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut sum = 0.0;
    for part in parts {
        for &x in part {
            sum += x * x;
        }
    }
    sum.sqrt()
}

/// Linear-interpolation percentile on a sorted copy: rank = q * (n - 1),
/// interpolating between the floor and ceil ranks.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty { what: "percentile input" });
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidQuantile { q });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Seedable generator with a fixed algorithm (xoshiro256**), so streams are
/// bit-identical for identical seeds on all platforms. Never backed by the
/// platform RNG. Single-owner: do not draw from one `Rng` concurrently.
#[derive(Debug, Clone)]
pub struct Rng {
    state: [u64; 4],
}

impl Rng {
    /// Expands the seed through SplitMix64 into the xoshiro256** state.
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let mut next = || {
            sm = sm.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = sm;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        Rng {
            state: [next(), next(), next(), next()],
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi); equal bounds yield the constant `lo`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }

    /// Uniform draw in 0..n. Panics if n is zero.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        (self.next_u64() % n as u64) as usize
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// `n` uniform draws in [lo, hi), deterministic per the rng state.
pub fn seeded_uniform(rng: &mut Rng, lo: f64, hi: f64, n: usize) -> Result<Vector> {
    if lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    Ok((0..n).map(|_| rng.uniform(lo, hi)).collect())
}
