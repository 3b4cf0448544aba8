//! Finite-window block-banded operators.
//!
//! An operator stores one dense `m x m` block for every pair `(j, k)` with
//! `|j - k| <= s` and both indices inside the window. Blocks reaching outside
//! the window are treated as zero (Dirichlet truncation), so only the rows
//! whose full band lies inside the window ("interior rows") represent the
//! infinite-lattice operator faithfully.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{LatticeState, Window};

pub type Block = DMatrix<Complex64>;

/// Relative threshold below which an external block counts as singular.
const SINGULAR_RTOL: f64 = 1e-13;

/// Truncation behaviour at the window edges. Only zero padding is supported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    #[default]
    ZeroPad,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandedOperator {
    s: usize,
    m: usize,
    window: Window,
    boundary: BoundaryPolicy,
    // row-major: blocks[offset(j) * (2s+1) + (k - j + s)]
    blocks: Vec<Block>,
}

/// Uniform bounds `||A_{j,k}|| <= a` and `||A_{j,j+-s}^{-1}|| <= 1/delta`
/// measured on interior rows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandConstants {
    pub a: f64,
    pub delta: f64,
}

/// Spectral norm of a block.
pub fn block_norm(b: &Block) -> f64 {
    if b.nrows() == 1 {
        return b[(0, 0)].norm();
    }
    b.clone().svd(false, false).singular_values.max()
}

/// Smallest singular value of a square block.
pub fn block_min_singular(b: &Block) -> f64 {
    if b.nrows() == 1 {
        return b[(0, 0)].norm();
    }
    b.clone().svd(false, false).singular_values.min()
}

pub(crate) fn is_singular(b: &Block) -> (bool, f64) {
    let smin = block_min_singular(b);
    let smax = block_norm(b);
    (smin == 0.0 || smin <= SINGULAR_RTOL * smax, smin)
}

pub fn scalar_block(z: Complex64) -> Block {
    DMatrix::from_element(1, 1, z)
}

impl BandedOperator {
    /// Builds an operator from a block generator and enforces invertibility of
    /// every external block on interior rows.
    pub fn new(s: usize, m: usize, window: Window, f: impl FnMut(i64, i64) -> Block) -> Result<Self> {
        let op = Self::new_unchecked(s, m, window, f)?;
        op.check_external()?;
        Ok(op)
    }

    /// Like [`BandedOperator::new`] but only checks shapes. Used for degenerate
    /// operators such as the zero operator.
    pub fn new_unchecked(
        s: usize,
        m: usize,
        window: Window,
        mut f: impl FnMut(i64, i64) -> Block,
    ) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidArgument("half-bandwidth s must be positive".into()));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("block dimension m must be positive".into()));
        }
        let width = 2 * s + 1;
        let mut blocks = Vec::with_capacity(window.len() * width);
        for j in window.indices() {
            for d in -(s as i64)..=(s as i64) {
                let k = j + d;
                if window.contains(k) {
                    let b = f(j, k);
                    if b.nrows() != m || b.ncols() != m {
                        return Err(Error::InvalidArgument(format!(
                            "block ({j},{k}) has shape {}x{}, expected {m}x{m}",
                            b.nrows(),
                            b.ncols()
                        )));
                    }
                    blocks.push(b);
                } else {
                    blocks.push(DMatrix::zeros(m, m));
                }
            }
        }
        Ok(Self { s, m, window, boundary: BoundaryPolicy::ZeroPad, blocks })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn block_dim(&self) -> usize {
        self.m
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn boundary_policy(&self) -> BoundaryPolicy {
        self.boundary
    }

    fn slot(&self, j: i64, k: i64) -> Option<usize> {
        let d = k - j;
        if d.abs() > self.s as i64 || !self.window.contains(j) || !self.window.contains(k) {
            return None;
        }
        Some(self.window.offset(j) * (2 * self.s + 1) + (d + self.s as i64) as usize)
    }

    /// Block `A_{j,k}`, or `None` outside the band or the window.
    pub fn block(&self, j: i64, k: i64) -> Option<&Block> {
        self.slot(j, k).map(|i| &self.blocks[i])
    }

    /// Rows whose full band `[j-s, j+s]` lies inside the window.
    pub fn interior_rows(&self) -> std::ops::RangeInclusive<i64> {
        let s = self.s as i64;
        (self.window.lo + s)..=(self.window.hi - s)
    }

    pub fn is_interior_row(&self, j: i64) -> bool {
        self.interior_rows().contains(&j)
    }

    fn check_external(&self) -> Result<()> {
        let s = self.s as i64;
        for j in self.interior_rows() {
            for k in [j - s, j + s] {
                let b = self.block(j, k).expect("interior row band is in-window");
                let (sing, smin) = is_singular(b);
                if sing {
                    return Err(Error::SingularExternal { row: j, col: k, sigma_min: smin });
                }
            }
        }
        Ok(())
    }

    /// `(Ax)_j = sum_{k=j-s}^{j+s} A_{j,k} x_k`, exact on the window with zero padding.
    pub fn apply(&self, x: &LatticeState) -> Result<LatticeState> {
        if x.window() != self.window || x.block_dim() != self.m {
            return Err(Error::InvalidArgument(format!(
                "state window {:?}/m={} does not match operator window {:?}/m={}",
                x.window(),
                x.block_dim(),
                self.window,
                self.m
            )));
        }
        let mut out = LatticeState::zeros(self.window, self.m, x.t);
        let s = self.s as i64;
        for j in self.window.indices() {
            let mut acc = vec![Complex64::new(0.0, 0.0); self.m];
            for k in (j - s).max(self.window.lo)..=(j + s).min(self.window.hi) {
                let b = self.block(j, k).unwrap();
                let xk = x.block(k);
                for (r, a) in acc.iter_mut().enumerate() {
                    for (c, xv) in xk.iter().enumerate() {
                        *a += b[(r, c)] * xv;
                    }
                }
            }
            out.block_mut(j).copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// `(A*)_{j,k} = (A_{k,j})^H`.
    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for j in self.window.indices() {
            for k in self.band_cols(j) {
                let i = out.slot(j, k).unwrap();
                out.blocks[i] = self.block(k, j).unwrap().adjoint();
            }
        }
        out
    }

    /// The "conjugate" operator with entries `(A_{j,k})^H` kept at position `(j,k)`.
    /// For scalar entries this is the entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            *b = b.adjoint();
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            *b *= c;
        }
        out
    }

    /// In-window columns of the band of row `j`.
    pub fn band_cols(&self, j: i64) -> std::ops::RangeInclusive<i64> {
        let s = self.s as i64;
        (j - s).max(self.window.lo)..=(j + s).min(self.window.hi)
    }

    /// Audits `a = max ||A_{j,k}||` and `delta = min sigma_min(A_{j,j+-s})` over interior rows.
    pub fn audit_constants(&self) -> Result<BandConstants> {
        if self.interior_rows().is_empty() {
            return Err(Error::InvalidArgument(format!(
                "window {:?} has no interior rows for s={}",
                self.window, self.s
            )));
        }
        let s = self.s as i64;
        let mut a: f64 = 0.0;
        let mut delta = f64::INFINITY;
        for j in self.interior_rows() {
            for k in j - s..=j + s {
                let b = self.block(j, k).unwrap();
                a = a.max(block_norm(b));
                if (k - j).abs() == s {
                    let (sing, smin) = is_singular(b);
                    if sing {
                        return Err(Error::SingularExternal { row: j, col: k, sigma_min: smin });
                    }
                    delta = delta.min(smin);
                }
            }
        }
        Ok(BandConstants { a, delta })
    }

    /// Dense `(len*m) x (len*m)` matrix of the windowed operator.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.window.len() * self.m;
        let mut out = DMatrix::zeros(n, n);
        for j in self.window.indices() {
            let r0 = self.window.offset(j) * self.m;
            for k in self.band_cols(j) {
                let c0 = self.window.offset(k) * self.m;
                out.view_mut((r0, c0), (self.m, self.m)).copy_from(self.block(j, k).unwrap());
            }
        }
        out
    }

    /// Largest absolute row sum of the dense matrix (the induced infinity norm);
    /// equals the 1-norm of the adjoint.
    pub fn dense_one_norm(&self) -> f64 {
        let d = self.to_dense();
        (0..d.ncols()).map(|c| d.column(c).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&OperatorDoc::from(self)).expect("operator serializes")
    }

    /// Parses the JSON document produced by [`BandedOperator::to_json`].
    /// Missing band entries are zero. Only shapes are validated; invertibility is
    /// checked by [`BandedOperator::audit_constants`] and the recurrences.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: OperatorDoc = serde_json::from_str(text)?;
        doc.into_operator()
    }
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    j: i64,
    k: i64,
    block: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct OperatorDoc {
    s: usize,
    m: usize,
    window: [i64; 2],
    entries: Vec<EntryDoc>,
}

impl From<&BandedOperator> for OperatorDoc {
    fn from(op: &BandedOperator) -> Self {
        let mut entries = Vec::new();
        for j in op.window.indices() {
            for k in op.band_cols(j) {
                let b = op.block(j, k).unwrap();
                if b.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    continue;
                }
                let mut block = Vec::with_capacity(op.m * op.m);
                for r in 0..op.m {
                    for c in 0..op.m {
                        block.push([b[(r, c)].re, b[(r, c)].im]);
                    }
                }
                entries.push(EntryDoc { j, k, block });
            }
        }
        Self { s: op.s, m: op.m, window: [op.window.lo, op.window.hi], entries }
    }
}

impl OperatorDoc {
    fn into_operator(self) -> Result<BandedOperator> {
        let window = Window::new(self.window[0], self.window[1])?;
        let m = self.m;
        let mut op = BandedOperator::new_unchecked(self.s, m, window, |_, _| DMatrix::zeros(m, m))?;
        for e in self.entries {
            let slot = op.slot(e.j, e.k).ok_or_else(|| {
                Error::InvalidArgument(format!("entry ({},{}) outside band or window", e.j, e.k))
            })?;
            if e.block.len() != m * m {
                return Err(Error::InvalidArgument(format!(
                    "entry ({},{}) has {} values, expected {}",
                    e.j,
                    e.k,
                    e.block.len(),
                    m * m
                )));
            }
            op.blocks[slot] = DMatrix::from_row_iterator(m, m, e.block.iter().map(|p| Complex64::new(p[0], p[1])));
        }
        Ok(op)
    }
}

/// `alpha * Delta_1` on the window: diagonal `-2 alpha`, off-diagonals `alpha`.
pub fn build_laplacian_1d(alpha: Complex64, window: Window) -> Result<BandedOperator> {
    build_schrodinger_with_potential(alpha, &vec![0.0; window.len()], window)
}

/// Scalar operator with `A_{j,j+-s} = 1`, `A_{j,j} = -2`, zero elsewhere.
pub fn build_higher_order_model(s: usize, window: Window) -> Result<BandedOperator> {
    if window.len() <= 2 * s {
        return Err(Error::InvalidArgument(format!(
            "window length {} must exceed 2s = {}",
            window.len(),
            2 * s
        )));
    }
    let si = s as i64;
    BandedOperator::new(s, 1, window, |j, k| {
        let v = if j == k {
            -2.0
        } else if (j - k).abs() == si {
            1.0
        } else {
            0.0
        };
        scalar_block(Complex64::new(v, 0.0))
    })
}

/// `alpha * (Delta_1 + V)`: diagonal `alpha (V_j - 2)`, off-diagonals `alpha`.
pub fn build_schrodinger_with_potential(alpha: Complex64, potential: &[f64], window: Window) -> Result<BandedOperator> {
    if potential.len() != window.len() {
        return Err(Error::InvalidArgument(format!(
            "potential has {} values, window has {} sites",
            potential.len(),
            window.len()
        )));
    }
    if potential.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("potential must be finite".into()));
    }
    let f = |j: i64, k: i64| {
        if j == k {
            scalar_block(alpha * (potential[window.offset(j)] - 2.0))
        } else {
            scalar_block(alpha)
        }
    };
    if alpha == Complex64::new(0.0, 0.0) {
        BandedOperator::new_unchecked(1, 1, window, f)
    } else {
        BandedOperator::new(1, 1, window, f)
    }
}
