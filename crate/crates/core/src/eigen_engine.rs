//! Generalized eigenvectors `A* e = lambda e` grown from `2s` seed blocks.
//!
//! Row `k >= 0` of the eigen-equation is solved for the far-right unknown
//! `e_{k+s}` using the band entries `e_{k-s..k+s-1}`; row `-k` (`k >= 1`) is
//! solved for the far-left unknown `e_{-k-s}` using `e_{-k-s+1..-k+s}`. The
//! values can grow like `C^|j|`, so each index carries its own log scale.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_ops::{is_singular, BandConstants, BandedOperator, Block};
use crate::state::Window;
use crate::stats::linear_fit;

/// Blocks are renormalized once their norm passes `e^RESCALE_LOG`.
const RESCALE_LOG: f64 = 300.0;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenFamily {
    lambda: Complex64,
    s: usize,
    m: usize,
    window: Window,
    seeds: Vec<Vec<Complex64>>,
    // true value of block j is mant[j] * exp(log_scale[j])
    mant: Vec<Complex64>,
    log_scale: Vec<f64>,
    residuals: Vec<RowResidual>,
    seed_norm: f64,
}

/// Eigen-equation defect on one row whose band lies inside the window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowResidual {
    pub row: i64,
    /// `ln ||(A* e)_j - lambda e_j||`.
    pub log_abs: f64,
    /// Defect divided by `sum_k ||A*_{j,k}|| ||e_k|| + |lambda| ||e_j||`.
    pub relative: f64,
}

impl EigenFamily {
    pub fn lambda(&self) -> Complex64 {
        self.lambda
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

    pub fn seeds(&self) -> &[Vec<Complex64>] {
        &self.seeds
    }

    /// Largest seed norm (the constant `M` of the growth bound).
    pub fn seed_norm(&self) -> f64 {
        self.seed_norm
    }

    pub fn residuals(&self) -> &[RowResidual] {
        &self.residuals
    }

    /// Block `e_j` as `(mantissa, log_scale)`.
    pub fn scaled_block(&self, j: i64) -> (&[Complex64], f64) {
        let o = self.window.offset(j);
        (&self.mant[o * self.m..(o + 1) * self.m], self.log_scale[o])
    }

    /// Materialized block `e_j`; entries overflow to infinity for huge values.
    pub fn block(&self, j: i64) -> Vec<Complex64> {
        let (b, sc) = self.scaled_block(j);
        let f = sc.exp();
        b.iter().map(|z| z * f).collect()
    }

    /// Scalar value `e_j` (first component).
    pub fn at(&self, j: i64) -> Complex64 {
        self.block(j)[0]
    }

    /// `ln ||e_j||`, `-inf` for a zero block.
    pub fn log_norm(&self, j: i64) -> f64 {
        let (b, sc) = self.scaled_block(j);
        let n = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            f64::NEG_INFINITY
        } else {
            n.ln() + sc
        }
    }

    /// Overwrites `e_j` (used to probe residual sensitivity).
    pub fn set_block(&mut self, j: i64, block: &[Complex64]) -> Result<()> {
        if block.len() != self.m || !self.window.contains(j) {
            return Err(Error::InvalidArgument(format!("block for index {j} has wrong shape or lies outside the window")));
        }
        let o = self.window.offset(j);
        self.mant[o * self.m..(o + 1) * self.m].copy_from_slice(block);
        self.log_scale[o] = 0.0;
        Ok(())
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.relative).fold(0.0, f64::max)
    }

    /// CSV with columns `t, n, block_index, re, im, log_abs, lambda_re, lambda_im` (`t = 0`).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["t", "n", "block_index", "re", "im", "log_abs", "lambda_re", "lambda_im"])?;
        for j in self.window.indices() {
            let (b, sc) = self.scaled_block(j);
            for (i, z) in b.iter().enumerate() {
                let v = z * sc.exp();
                let la = if z.norm() == 0.0 { f64::NEG_INFINITY } else { z.norm().ln() + sc };
                wtr.write_record([
                    "0".to_string(),
                    j.to_string(),
                    i.to_string(),
                    v.re.to_string(),
                    v.im.to_string(),
                    la.to_string(),
                    self.lambda.re.to_string(),
                    self.lambda.im.to_string(),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

fn matvec_add(acc: &mut [Complex64], b: &Block, x: &[Complex64], factor: Complex64) {
    for (r, a) in acc.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (c, xv) in x.iter().enumerate() {
            s += b[(r, c)] * xv;
        }
        *a += factor * s;
    }
}

fn solve_block(b: &Block, rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    if b.nrows() == 1 {
        let d = b[(0, 0)];
        return (d.norm() != 0.0).then(|| vec![rhs[0] / d]);
    }
    let x = DMatrix::from(b.clone()).lu().solve(&DVector::from_column_slice(rhs))?;
    Some(x.iter().copied().collect())
}

struct Builder<'a> {
    astar: &'a BandedOperator,
    lambda: Complex64,
    m: usize,
    window: Window,
    mant: Vec<Complex64>,
    log_scale: Vec<f64>,
    known: Vec<bool>,
}

impl Builder<'_> {
    fn get(&self, j: i64) -> (&[Complex64], f64) {
        let o = self.window.offset(j);
        (&self.mant[o * self.m..(o + 1) * self.m], self.log_scale[o])
    }

    fn put(&mut self, j: i64, mut v: Vec<Complex64>, mut scale: f64) {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > RESCALE_LOG.exp() {
            let f = (-RESCALE_LOG).exp();
            v.iter_mut().for_each(|z| *z *= f);
            scale += RESCALE_LOG;
        }
        let o = self.window.offset(j);
        self.mant[o * self.m..(o + 1) * self.m].copy_from_slice(&v);
        self.log_scale[o] = scale;
        self.known[o] = true;
    }

    fn reference_scale(&self, cols: impl Iterator<Item = i64>) -> f64 {
        cols.map(|k| self.get(k).1).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Solves row `j` of `A* e = lambda e` for the external unknown `u`.
    fn step(&mut self, j: i64, u: i64) -> Result<()> {
        let s = self.astar.s() as i64;
        let cols = (j - s..=j + s).filter(|&k| k != u);
        let r = self.reference_scale(cols.clone());
        let mut rhs = vec![Complex64::new(0.0, 0.0); self.m];
        {
            let (ej, sj) = self.get(j);
            let f = self.lambda * (sj - r).exp();
            rhs.iter_mut().zip(ej).for_each(|(a, e)| *a += f * e);
        }
        for k in cols {
            let (ek, sk) = self.get(k);
            matvec_add(&mut rhs, self.astar.block(j, k).unwrap(), ek, Complex64::new(-(sk - r).exp(), 0.0));
        }
        let ext = self.astar.block(j, u).unwrap();
        let (sing, smin) = is_singular(ext);
        let v = if sing { None } else { solve_block(ext, &rhs) };
        let v = v.ok_or(Error::SingularExternal { row: j, col: u, sigma_min: smin })?;
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric(format!("non-finite eigenvector block at index {u}")));
        }
        self.put(u, v, r);
        Ok(())
    }
}

/// Row residuals of `A* e - lambda e` for every interior row.
fn row_residuals(astar: &BandedOperator, lambda: Complex64, fam: &EigenFamily) -> Vec<RowResidual> {
    let s = astar.s() as i64;
    astar
        .interior_rows()
        .map(|j| {
            let r = (j - s..=j + s).map(|k| fam.scaled_block(k).1).fold(f64::NEG_INFINITY, f64::max);
            let mut acc = vec![Complex64::new(0.0, 0.0); fam.m];
            let mut scale = 0.0;
            let (ej, sj) = fam.scaled_block(j);
            let f = (sj - r).exp();
            acc.iter_mut().zip(ej).for_each(|(a, e)| *a -= lambda * f * e);
            scale += lambda.norm() * f * ej.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for k in j - s..=j + s {
                let (ek, sk) = fam.scaled_block(k);
                let f = (sk - r).exp();
                let b = astar.block(j, k).unwrap();
                matvec_add(&mut acc, b, ek, Complex64::new(f, 0.0));
                scale += crate::lattice_ops::block_norm(b) * f * ek.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            }
            let n = acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            RowResidual {
                row: j,
                log_abs: if n == 0.0 { f64::NEG_INFINITY } else { n.ln() + r },
                relative: if scale == 0.0 { 0.0 } else { n / scale },
            }
        })
        .collect()
}

/// Builds `e(lambda)` with `A* e = lambda e` from seeds `e_{-s}, ..., e_{s-1}`.
pub fn extend_eigenvector(a: &BandedOperator, seeds: &[Vec<Complex64>], lambda: Complex64) -> Result<EigenFamily> {
    extend_with_adjoint(&a.adjoint(), seeds, lambda)
}

/// Same as [`extend_eigenvector`] with the adjoint already formed; the family
/// solves `astar e = lambda e`.
pub fn extend_with_adjoint(astar: &BandedOperator, seeds: &[Vec<Complex64>], lambda: Complex64) -> Result<EigenFamily> {
    let s = astar.s() as i64;
    let m = astar.block_dim();
    let window = astar.window();
    if seeds.len() != 2 * s as usize || seeds.iter().any(|b| b.len() != m) {
        return Err(Error::InvalidArgument(format!("need {} seed blocks of dimension {m}", 2 * s)));
    }
    if window.lo > -s - 1 || window.hi < s {
        return Err(Error::InvalidArgument(format!(
            "window {:?} must contain [{}, {}] to take one step in each direction",
            window,
            -s - 1,
            s
        )));
    }
    let mut b = Builder {
        astar,
        lambda,
        m,
        window,
        mant: vec![Complex64::new(0.0, 0.0); window.len() * m],
        log_scale: vec![0.0; window.len()],
        known: vec![false; window.len()],
    };
    for (i, seed) in seeds.iter().enumerate() {
        b.put(-s + i as i64, seed.clone(), 0.0);
    }
    // Seeds are stored verbatim even if large.
    for (i, seed) in seeds.iter().enumerate() {
        let o = window.offset(-s + i as i64);
        b.mant[o * m..(o + 1) * m].copy_from_slice(seed);
        b.log_scale[o] = 0.0;
    }
    for k in 0..=(window.hi - s) {
        b.step(k, k + s)?;
    }
    for k in 1..=(-window.lo - s) {
        b.step(-k, -k - s)?;
    }
    debug_assert!(b.known.iter().all(|&x| x));
    let seed_norm = seeds
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut fam = EigenFamily {
        lambda,
        s: s as usize,
        m,
        window,
        seeds: seeds.to_vec(),
        mant: b.mant,
        log_scale: b.log_scale,
        residuals: Vec::new(),
        seed_norm,
    };
    fam.residuals = row_residuals(astar, lambda, &fam);
    Ok(fam)
}

/// Unit seeds: `e_r = x` for the given residue `r` in `[-s, s)`, zero otherwise.
pub fn unit_seeds(s: usize, m: usize, r: i64, x: &[Complex64]) -> Vec<Vec<Complex64>> {
    (-(s as i64)..s as i64)
        .map(|k| if k == r { x.to_vec() } else { vec![Complex64::new(0.0, 0.0); m] })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCheck {
    /// Largest `||(A* e)_j - lambda e_j||` over interior rows (may be infinite for huge families).
    pub max_abs: f64,
    pub max_relative: f64,
    pub worst_row: i64,
}

/// Recomputes the eigen-equation defect of a family against `A`.
pub fn verify_eigen(a: &BandedOperator, fam: &EigenFamily) -> Result<EigenCheck> {
    if a.window() != fam.window || a.s() != fam.s || a.block_dim() != fam.m {
        return Err(Error::InvalidArgument("family and operator shapes differ".into()));
    }
    let rows = row_residuals(&a.adjoint(), fam.lambda, fam);
    let mut out = EigenCheck { max_abs: 0.0, max_relative: 0.0, worst_row: a.interior_rows().start().to_owned() };
    let mut worst_log = f64::NEG_INFINITY;
    for r in rows {
        if r.log_abs > worst_log {
            worst_log = r.log_abs;
            out.worst_row = r.row;
        }
        out.max_relative = out.max_relative.max(r.relative);
    }
    out.max_abs = worst_log.exp();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthAuditReport {
    pub fitted_b: f64,
    pub fitted_c: f64,
    pub log_fitted_c: f64,
    pub bound_holds: bool,
    /// `max ln ||e_j||` over `j in {ks..ks+s-1} u {-ks-s..-ks-1}` for `k = 0, 1, ...`.
    pub per_k_log_norms: Vec<f64>,
    /// Least-squares slope of the trailing half of `per_k_log_norms`.
    pub growth_rate: f64,
    pub b_cap: f64,
    pub degenerate: bool,
}

/// Fits `ln ||e_{+-(ks+r)}|| <= ln(C M) - k ln(delta) + (k+2) ln(|lambda| + b)`.
///
/// `b` is the smallest multiple of 0.05 whose per-step rate `ln(|lambda|+b) - ln delta`
/// dominates the observed growth rate; `C` is then the largest slack.
pub fn growth_audit(fam: &EigenFamily, consts: &BandConstants) -> Result<GrowthAuditReport> {
    let s = fam.s as i64;
    let w = fam.window;
    let kmax = ((w.hi + 1) / s).min((-w.lo) / s) - 1;
    if kmax < 9 {
        return Err(Error::InvalidArgument(format!("family covers only {} band steps, need at least 10", kmax + 1)));
    }
    let per_k: Vec<f64> = (0..=kmax)
        .map(|k| {
            (0..s)
                .flat_map(|r| [k * s + r, -k * s - r - 1])
                .map(|j| fam.log_norm(j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let b_cap = 10.0 * (consts.a / consts.delta + 1.0);
    let lam = fam.lambda.norm();
    if per_k.iter().all(|v| *v == f64::NEG_INFINITY) || fam.seed_norm == 0.0 {
        return Ok(GrowthAuditReport {
            fitted_b: 0.0,
            fitted_c: 0.0,
            log_fitted_c: f64::NEG_INFINITY,
            bound_holds: true,
            per_k_log_norms: per_k,
            growth_rate: f64::NEG_INFINITY,
            b_cap,
            degenerate: true,
        });
    }
    let half = per_k.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        (half..per_k.len()).filter(|&k| per_k[k].is_finite()).map(|k| (k as f64, per_k[k])).unzip();
    let rate = linear_fit(&xs, &ys).map(|f| f.0).unwrap_or(0.0);
    let ld = consts.delta.ln();
    let needed = consts.delta * rate.exp() - lam;
    let mut b = (needed.max(0.0) / 0.05).ceil() * 0.05;
    while (lam + b) <= 0.0 || (lam + b).ln() - ld < rate {
        b += 0.05;
    }
    let lm = fam.seed_norm.ln();
    let lb = (lam + b).ln();
    let log_c = per_k
        .iter()
        .enumerate()
        .map(|(k, v)| v - lm + k as f64 * ld - (k as f64 + 2.0) * lb)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GrowthAuditReport {
        fitted_b: b,
        fitted_c: log_c.exp(),
        log_fitted_c: log_c,
        bound_holds: b <= b_cap + 1e-12 && log_c.is_finite(),
        per_k_log_norms: per_k,
        growth_rate: rate,
        b_cap,
        degenerate: false,
    })
}

/// Coefficients of a polynomial from samples at `n` points on the circle `|z| = radius`.
pub fn coefficients_on_circle(f: impl Fn(Complex64) -> Complex64, n: usize, radius: f64) -> Vec<Complex64> {
    let samples: Vec<Complex64> = (0..n)
        .map(|k| f(Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64)))
        .collect();
    (0..n)
        .map(|d| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, v) in samples.iter().enumerate() {
                acc += v * Complex64::from_polar(1.0, -std::f64::consts::TAU * (k * d % n) as f64 / n as f64);
            }
            acc / (n as f64 * radius.powi(d as i32))
        })
        .collect()
}

/// Largest index whose coefficient exceeds `rel_tol` times the largest coefficient;
/// `None` for the zero polynomial.
pub fn numerical_degree(coeffs: &[Complex64], rel_tol: f64) -> Option<usize> {
    let big = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if big == 0.0 {
        return None;
    }
    coeffs.iter().rposition(|z| z.norm() > rel_tol * big)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_ops::build_laplacian_1d;
    use crate::sampling::{random_complex, random_scalar_operator, random_seeds, trial_rng, OperatorLimits};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lap(radius: i64) -> BandedOperator {
        build_laplacian_1d(c(1.0, 0.0), Window::centered(radius)).unwrap()
    }

    #[test]
    fn laplacian_linear_family() {
        let fam = extend_eigenvector(&lap(20), &unit_seeds(1, 1, 0, &[c(1.0, 0.0)]), c(0.0, 0.0)).unwrap();
        for j in -20..=20 {
            assert_eq!(fam.at(j), c((j + 1) as f64, 0.0), "j={j}");
        }
        assert!(fam.max_relative_residual() < 1e-15);
    }

    #[test]
    fn zero_seeds_give_zero_family() {
        let fam = extend_eigenvector(&lap(10), &unit_seeds(1, 1, 0, &[c(0.0, 0.0)]), c(2.0, 1.0)).unwrap();
        assert!((-10..=10).all(|j| fam.at(j) == c(0.0, 0.0)));
        let rep = growth_audit(&fam, &BandConstants { a: 2.0, delta: 1.0 }).unwrap();
        assert!(rep.degenerate && rep.bound_holds);
    }

    #[test]
    fn recurrence_ranges_are_asymmetric() {
        // s = 2: row 0 determines e_2 from e_{-2..1}; row -1 determines e_{-3} from e_{-2..1}.
        let w = Window::centered(6);
        let mut rng = trial_rng(9, 0);
        let a = random_scalar_operator(&mut rng, 2, w, &OperatorLimits::default());
        let seeds = random_seeds(&mut rng, 2, 1);
        let lambda = c(0.3, -0.4);
        let fam = extend_eigenvector(&a, &seeds, lambda).unwrap();
        let ast = a.adjoint();
        let e = |j: i64| fam.at(j);
        let b = |j: i64, k: i64| ast.block(j, k).unwrap()[(0, 0)];
        let fwd = (lambda * e(0) - (-2..=1).map(|m| b(0, m) * e(m)).sum::<Complex64>()) / b(0, 2);
        assert!((fwd - e(2)).norm() < 1e-13);
        let bwd = (lambda * e(-1) - (-2..=1).map(|m| b(-1, m) * e(m)).sum::<Complex64>()) / b(-1, -3);
        assert!((bwd - e(-3)).norm() < 1e-13);
        for j in 0..4 {
            assert_eq!(fam.block(j - 2), seeds[j as usize]);
        }
    }

    #[test]
    fn polynomial_degree_in_lambda() {
        let w = Window::centered(14);
        let mut rng = trial_rng(21, 0);
        for s in 1..=3usize {
            let a = random_scalar_operator(&mut rng, s, w, &OperatorLimits::default());
            let seeds = random_seeds(&mut rng, s, 1);
            for j in [-14i64, -9, -(s as i64) - 1, 0, s as i64, 7, 13] {
                let coeffs = coefficients_on_circle(|z| extend_eigenvector(&a, &seeds, z).unwrap().at(j), 32, 1.0);
                let bound = j.unsigned_abs() as usize / s + 1;
                let deg = numerical_degree(&coeffs, 1e-11).unwrap_or(0);
                assert!(deg < bound, "s={s} j={j} deg={deg} bound={bound}");
                for _ in 0..5 {
                    let z = random_complex(&mut rng, 1.5);
                    let horner = coeffs[..bound].iter().rev().fold(c(0.0, 0.0), |acc, cf| acc * z + cf);
                    let direct = extend_eigenvector(&a, &seeds, z).unwrap().at(j);
                    assert!((horner - direct).norm() <= 1e-8 * direct.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn perturbation_is_detected() {
        let a = lap(20);
        let mut fam = extend_eigenvector(&a, &unit_seeds(1, 1, 0, &[c(1.0, 0.0)]), c(0.5, 0.0)).unwrap();
        assert!(verify_eigen(&a, &fam).unwrap().max_relative < 1e-14);
        let old = fam.at(5);
        fam.set_block(5, &[old + 1e-3]).unwrap();
        let chk = verify_eigen(&a, &fam).unwrap();
        assert!(chk.max_abs >= 1.0 * 1e-3 / 2.0);
        assert!((chk.worst_row - 5).abs() <= 1);
    }

    #[test]
    fn wrong_eigenvalue_is_detected() {
        let a = lap(20);
        let lam = c(0.8, 0.3);
        let fam = extend_eigenvector(&a, &unit_seeds(1, 1, 0, &[c(1.0, 0.0)]), 2.0 * lam).unwrap();
        let mut other = fam.clone();
        other.lambda = lam;
        let chk = verify_eigen(&a, &other).unwrap();
        let min_e = (-19..=19).map(|j| fam.at(j).norm()).fold(f64::INFINITY, f64::min);
        assert!(chk.max_abs >= lam.norm() * min_e);
    }

    #[test]
    fn growth_of_laplacian_families() {
        let a = lap(60);
        let k = a.audit_constants().unwrap();
        let lin = extend_eigenvector(&a, &unit_seeds(1, 1, 0, &[c(1.0, 0.0)]), c(0.0, 0.0)).unwrap();
        let rep = growth_audit(&lin, &k).unwrap();
        assert!(rep.bound_holds && rep.growth_rate < 0.1 && rep.fitted_b <= 1.5);
        let fast = extend_eigenvector(&a, &unit_seeds(1, 1, 0, &[c(1.0, 0.0)]), c(10.0, 0.0)).unwrap();
        let rep = growth_audit(&fast, &k).unwrap();
        let want = 12f64.ln();
        assert!((rep.growth_rate - want).abs() <= 0.2 * want);
        assert!((rep.growth_rate - (6.0 + 35f64.sqrt()).ln()).abs() < 1e-6);
        assert!(rep.bound_holds);
    }

    #[test]
    fn rescaling_keeps_huge_families_exact() {
        let a = lap(400);
        let fam = extend_eigenvector(&a, &unit_seeds(1, 1, 0, &[c(1.0, 0.0)]), c(10.0, 0.0)).unwrap();
        let z = (6.0 + 35f64.sqrt()).ln();
        assert!((fam.log_norm(400) - 400.0 * z).abs() < 1.0);
        assert!(fam.log_norm(400) > 900.0);
        assert!(fam.max_relative_residual() < 1e-13);
    }

    #[test]
    fn conjugation_symmetry_for_real_selfadjoint() {
        let w = Window::centered(15);
        let v: Vec<f64> = (0..w.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = crate::lattice_ops::build_schrodinger_with_potential(c(1.0, 0.0), &v, w).unwrap();
        let seeds = vec![vec![c(0.2, 0.9)], vec![c(-1.0, 0.4)]];
        let conj_seeds: Vec<_> = seeds.iter().map(|b: &Vec<Complex64>| b.iter().map(|z| z.conj()).collect()).collect();
        let lam = c(0.7, -1.3);
        let f1 = extend_eigenvector(&a, &seeds, lam).unwrap();
        let f2 = extend_eigenvector(&a, &conj_seeds, lam.conj()).unwrap();
        for j in w.indices() {
            assert!((f1.at(j).conj() - f2.at(j)).norm() <= 1e-12 * f1.at(j).norm().max(1.0));
        }
    }

    #[test]
    fn family_csv_has_lambda_columns() {
        let fam = extend_eigenvector(&lap(3), &unit_seeds(1, 1, 0, &[c(1.0, 0.0)]), c(0.5, -1.0)).unwrap();
        let mut buf = Vec::new();
        fam.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,n,block_index,re,im,log_abs,lambda_re,lambda_im\n"));
        assert!(text.lines().nth(1).unwrap().ends_with(",0.5,-1"));
    }

    #[test]
    fn singular_external_entry_reported() {
        let w = Window::centered(6);
        // A_{3,2} = 0 makes A*_{2,3} vanish, the entry forward row 2 inverts.
        let b = BandedOperator::new_unchecked(1, 1, w, |j, k| {
            crate::lattice_ops::scalar_block(if j == 3 && k == 2 { c(0.0, 0.0) } else { c(1.0, 0.0) })
        })
        .unwrap();
        match extend_eigenvector(&b, &unit_seeds(1, 1, 0, &[c(1.0, 0.0)]), c(0.0, 0.0)) {
            Err(Error::SingularExternal { row, col, .. }) => assert_eq!((row, col), (2, 3)),
            other => panic!("expected singular external entry, got {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn linear_in_seeds(seed in 0u64..1000, s in 1usize..=3, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let mut rng = trial_rng(seed, 0);
            let w = Window::centered(12);
            let a = random_scalar_operator(&mut rng, s, w, &OperatorLimits::default());
            let s1 = random_seeds(&mut rng, s, 1);
            let s2 = random_seeds(&mut rng, s, 1);
            let (al, be) = (c(re, im), c(im, -re));
            let mix: Vec<Vec<Complex64>> = s1.iter().zip(&s2).map(|(x, y)| vec![al * x[0] + be * y[0]]).collect();
            let lam = c(im, re);
            let f1 = extend_eigenvector(&a, &s1, lam).unwrap();
            let f2 = extend_eigenvector(&a, &s2, lam).unwrap();
            let fm = extend_eigenvector(&a, &mix, lam).unwrap();
            for j in w.indices() {
                let want = al * f1.at(j) + be * f2.at(j);
                let scale = (al.norm() * f1.at(j).norm() + be.norm() * f2.at(j).norm()).max(1e-300);
                prop_assert!((fm.at(j) - want).norm() <= 1e-10 * scale);
            }
        }

        #[test]
        fn residuals_small_for_random_blocks(seed in 0u64..1000, s in 1usize..=2) {
            let mut rng = trial_rng(seed, 1);
            let w = Window::centered(10);
            let m = 2;
            let a = BandedOperator::new(s, m, w, |j, k| {
                let mut b = crate::sampling::random_block(&mut rng, m, 1.0);
                if (j - k).unsigned_abs() as usize == s {
                    b += DMatrix::identity(m, m) * c(3.0, 0.0);
                }
                b
            }).unwrap();
            let seeds = random_seeds(&mut rng, s, m);
            let fam = extend_eigenvector(&a, &seeds, random_complex(&mut rng, 5.0)).unwrap();
            prop_assert!(verify_eigen(&a, &fam).unwrap().max_relative < 1e-12);
        }
    }
}
