//! Time-stamped block-valued states on a finite integer window.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive integer interval `[lo, hi]` of lattice indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Symmetric window `[-radius, radius]`.
    pub fn centered(radius: i64) -> Self {
        Self { lo: -radius.abs(), hi: radius.abs() }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, j: i64) -> bool {
        self.lo <= j && j <= self.hi
    }

    /// Offset of index `j` from the left edge. Caller guarantees `contains(j)`.
    #[inline]
    pub fn offset(&self, j: i64) -> usize {
        debug_assert!(self.contains(j));
        (j - self.lo) as usize
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    /// Distance from `j` to the nearest window edge.
    pub fn edge_distance(&self, j: i64) -> i64 {
        (j - self.lo).min(self.hi - j)
    }
}

/// A finitely supported function on a window with values in `C^m`, stamped with a time.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    window: Window,
    m: usize,
    pub t: f64,
    values: Vec<Complex64>,
}

impl LatticeState {
    pub fn zeros(window: Window, m: usize, t: f64) -> Self {
        Self { window, m, t, values: vec![Complex64::new(0.0, 0.0); window.len() * m] }
    }

    /// Unit vector `x` placed at site `n` (the embedding `i_n x`).
    pub fn embed(window: Window, n: i64, x: &[Complex64], t: f64) -> Result<Self> {
        if !window.contains(n) {
            return Err(Error::InvalidArgument(format!("site {n} outside window")));
        }
        let mut st = Self::zeros(window, x.len(), t);
        st.block_mut(n).copy_from_slice(x);
        Ok(st)
    }

    /// Scalar Kronecker delta at `n`.
    pub fn delta(window: Window, n: i64, t: f64) -> Result<Self> {
        Self::embed(window, n, &[Complex64::new(1.0, 0.0)], t)
    }

    pub fn from_values(window: Window, m: usize, t: f64, values: Vec<Complex64>) -> Result<Self> {
        if m == 0 || values.len() != window.len() * m {
            return Err(Error::InvalidArgument(format!(
                "expected {} values for window of length {} and block dimension {m}, got {}",
                window.len() * m,
                window.len(),
                values.len()
            )));
        }
        Ok(Self { window, m, t, values })
    }

    /// Scalar state from a closure over the index.
    pub fn from_fn(window: Window, t: f64, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let values = window.indices().map(&mut f).collect();
        Self { window, m: 1, t, values }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn block_dim(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn block(&self, j: i64) -> &[Complex64] {
        let o = self.window.offset(j) * self.m;
        &self.values[o..o + self.m]
    }

    pub fn block_mut(&mut self, j: i64) -> &mut [Complex64] {
        let o = self.window.offset(j) * self.m;
        &mut self.values[o..o + self.m]
    }

    /// Scalar value at `j` (first block component).
    pub fn at(&self, j: i64) -> Complex64 {
        self.block(j)[0]
    }

    pub fn block_norm(&self, j: i64) -> f64 {
        scaled_norm(self.block(j))
    }

    pub fn norm(&self) -> f64 {
        scaled_norm(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `<self, other> = sum_j sum_i self_{j,i} conj(other_{j,i})`, linear in the first slot.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.window != other.window || self.m != other.m {
            return Err(Error::InvalidArgument(format!(
                "state shapes differ: window {:?}/m={} vs {:?}/m={}",
                self.window, self.m, other.window, other.m
            )));
        }
        Ok(())
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(Self { window: self.window, m: self.m, t: self.t, values })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { window: self.window, m: self.m, t: self.t, values: self.values.iter().map(|z| z * c).collect() }
    }

    /// Writes `t, n, block_index, re, im, log_abs` rows (no header).
    pub(crate) fn write_rows<W: Write>(&self, wtr: &mut csv::Writer<W>, extra: &[f64]) -> Result<()> {
        for j in self.window.indices() {
            for (b, z) in self.block(j).iter().enumerate() {
                let mut rec = vec![
                    self.t.to_string(),
                    j.to_string(),
                    b.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                    z.norm().ln().to_string(),
                ];
                rec.extend(extra.iter().map(f64::to_string));
                wtr.write_record(&rec)?;
            }
        }
        Ok(())
    }

    /// CSV export with the mandatory header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(STATE_CSV_HEADER)?;
        self.write_rows(&mut wtr, &[])?;
        wtr.flush()?;
        Ok(())
    }
}

pub const STATE_CSV_HEADER: [&str; 6] = ["t", "n", "block_index", "re", "im", "log_abs"];

/// Euclidean norm that survives entries far below `sqrt(f64::MIN_POSITIVE)`.
fn scaled_norm(v: &[Complex64]) -> f64 {
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top == 0.0 || !top.is_finite() {
        return top;
    }
    top * v.iter().map(|z| (z / top).norm_sqr()).sum::<f64>().sqrt()
}
