//! How fast can a nonzero stationary solution decay?
//!
//! For `A u = 0` with a banded `A`, solving the kernel equation for the
//! far-left unknown gives `M_j >= q M_{j-1}` with `M_j = max_{-s<m<=s} ||u_{j+m}||`
//! and `q = delta / (2 s a)`. On `Z^d`, a solution of `Delta_d u + V u = 0`
//! satisfies a three-shell inequality over sup-norm shells.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen_engine::extend_eigenvector;
use crate::error::{Error, Result};
use crate::lattice_ops::{BandConstants, BandedOperator};
use crate::state::{LatticeState, Window};
use crate::stats::linear_fit;

/// Kernel residual tolerance relative to `||u||`.
pub const KERNEL_RTOL: f64 = 1e-10;

/// Length of the trailing windows used for rate estimates.
pub const RATE_WINDOW: usize = 10;

/// `delta / (a 2 s)`: kernel vectors cannot decay like `q^j` for `q` below this.
pub fn kernel_decay_threshold(consts: &BandConstants, s: usize) -> f64 {
    consts.delta / (consts.a * 2.0 * s as f64)
}

/// `-||V||_inf - 4 d + 1`, the log-rate below which `Delta_d u + V u = 0` forces `u = 0`.
pub fn schrodinger_threshold(d: usize, v_inf: f64) -> f64 {
    -v_inf - 4.0 * d as f64 + 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryVerdict {
    /// Smallest slope of `ln M_j` over trailing windows: a finite-range liminf.
    pub rate_estimate: f64,
    pub threshold: f64,
    pub forces_zero: bool,
    /// `(j, M_j)` for `j >= 0`.
    pub m_profile: Vec<(i64, f64)>,
    /// `u = 0`; the statement is vacuous.
    pub degenerate: bool,
}

/// Kernel vector of `A` grown from `2s` seed blocks at indices `-s..s`.
pub fn kernel_vector(a: &BandedOperator, seeds: &[Vec<Complex64>]) -> Result<LatticeState> {
    let fam = extend_eigenvector(&a.adjoint(), seeds, Complex64::new(0.0, 0.0))?;
    let w = a.window();
    let m = a.block_dim();
    let mut values = Vec::with_capacity(w.len() * m);
    for j in w.indices() {
        values.extend(fam.block(j));
    }
    LatticeState::from_values(w, m, 0.0, values)
}

/// Largest `||(A u)_j||` over interior rows.
pub fn interior_residual(a: &BandedOperator, u: &LatticeState) -> Result<f64> {
    let au = a.apply(u)?;
    Ok(a.interior_rows().map(|j| au.block_norm(j)).fold(0.0, f64::max))
}

/// Estimates the decay rate of a kernel vector against the threshold.
pub fn check_stationary_decay(u: &LatticeState, a: &BandedOperator) -> Result<StationaryVerdict> {
    let consts = a.audit_constants()?;
    let s = a.s();
    let threshold = kernel_decay_threshold(&consts, s);
    let unorm = u.norm();
    let residual = interior_residual(a, u)?;
    if residual > KERNEL_RTOL * unorm {
        return Err(Error::Precondition {
            message: format!("state is not in the kernel: interior residual {residual:.3e} vs norm {unorm:.3e}"),
            residual,
        });
    }
    let w: Window = u.window();
    let si = s as i64;
    let m_profile: Vec<(i64, f64)> = (0..=w.hi - si)
        .filter(|j| j - si + 1 >= w.lo)
        .map(|j| (j, (j - si + 1..=j + si).map(|k| u.block_norm(k)).fold(0.0, f64::max)))
        .collect();
    if unorm == 0.0 {
        return Ok(StationaryVerdict { rate_estimate: f64::NEG_INFINITY, threshold, forces_zero: false, m_profile, degenerate: true });
    }
    let tail = &m_profile[m_profile.len() / 2..];
    if tail.len() < RATE_WINDOW {
        return Err(Error::InvalidArgument(format!("window {w:?} too short for rate windows of length {RATE_WINDOW}")));
    }
    let mut rate_estimate = f64::INFINITY;
    for chunk in tail.windows(RATE_WINDOW) {
        let xs: Vec<f64> = chunk.iter().map(|(j, _)| *j as f64).collect();
        let ys: Vec<f64> = chunk.iter().map(|(_, m)| m.ln()).collect();
        let slope = if ys.iter().all(|y| y.is_finite()) {
            linear_fit(&xs, &ys).map_or(f64::NEG_INFINITY, |f| f.0)
        } else {
            f64::NEG_INFINITY
        };
        rate_estimate = rate_estimate.min(slope);
    }
    Ok(StationaryVerdict { rate_estimate, threshold, forces_zero: rate_estimate < threshold.ln(), m_profile, degenerate: false })
}

/// Complex field on the cube `[-radius, radius]^d`, last coordinate fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    d: usize,
    radius: i64,
    values: Vec<Complex64>,
}

impl LatticeField {
    pub fn from_fn(d: usize, radius: i64, mut f: impl FnMut(&[i64]) -> Complex64) -> Result<Self> {
        if !(1..=3).contains(&d) || radius < 2 {
            return Err(Error::InvalidArgument(format!("need 1 <= d <= 3 and radius >= 2, got d={d}, radius={radius}")));
        }
        let side = (2 * radius + 1) as usize;
        let mut values = Vec::with_capacity(side.pow(d as u32));
        let mut n = vec![-radius; d];
        for _ in 0..side.pow(d as u32) {
            values.push(f(&n));
            for i in (0..d).rev() {
                n[i] += 1;
                if n[i] <= radius {
                    break;
                }
                n[i] = -radius;
            }
        }
        Ok(Self { d, radius, values })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    fn offset(&self, n: &[i64]) -> usize {
        let side = 2 * self.radius + 1;
        n.iter().fold(0, |acc, &x| acc * side + (x + self.radius)) as usize
    }

    pub fn at(&self, n: &[i64]) -> Complex64 {
        self.values[self.offset(n)]
    }

    fn sites(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        let side = 2 * self.radius + 1;
        self.values.iter().enumerate().map(move |(i, z)| {
            let mut n = vec![0; self.d];
            let mut rest = i as i64;
            for k in (0..self.d).rev() {
                n[k] = rest % side - self.radius;
                rest /= side;
            }
            (n, *z)
        })
    }

    /// `max_{|n|_inf = N} |u(n)|` for `N = 0..=radius`.
    pub fn shell_maxima(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.radius as usize + 1];
        for (n, z) in self.sites() {
            let k = sup_norm(&n) as usize;
            out[k] = out[k].max(z.norm());
        }
        out
    }
}

fn sup_norm(n: &[i64]) -> i64 {
    n.iter().map(|x| x.abs()).max().unwrap_or(0)
}

/// `Delta_d u + V u` at an interior site.
fn schrodinger_residual(u: &LatticeField, v: &LatticeField, n: &[i64]) -> Complex64 {
    let mut m = n.to_vec();
    let mut acc = u.at(n) * (v.at(n) - 2.0 * u.d as f64);
    for i in 0..u.d {
        for step in [-1, 1] {
            m[i] = n[i] + step;
            acc += u.at(&m);
        }
        m[i] = n[i];
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellAudit {
    pub shell_max: Vec<f64>,
    /// `(4d - 2 + ||V||) max_N + max_{N+1} - max_{N-1}` for `N = 1..radius`.
    pub slack: Vec<f64>,
    pub violations: usize,
    /// Smallest `ln(max over shells N, N+1) / N` over the trailing half.
    pub rate_estimate: f64,
    pub threshold: f64,
    pub forces_zero: bool,
    pub degenerate: bool,
}

/// Checks the three-shell inequality and the decay rate of a solution of
/// `Delta_d u + V u = 0` (`V` real, given as a field on the same cube).
pub fn shell_decay_audit(u: &LatticeField, v: &LatticeField) -> Result<ShellAudit> {
    if u.d != v.d || u.radius != v.radius {
        return Err(Error::InvalidArgument("field and potential shapes differ".into()));
    }
    let d = u.d;
    let v_inf = v.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = schrodinger_threshold(d, v_inf);
    let umax = u.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut residual = 0.0f64;
    for (n, _) in u.sites().filter(|(n, _)| sup_norm(n) < u.radius) {
        residual = residual.max(schrodinger_residual(u, v, &n).norm());
    }
    if residual > KERNEL_RTOL * umax.max(f64::MIN_POSITIVE) && umax > 0.0 {
        return Err(Error::Precondition {
            message: format!("field does not solve the stationary equation: residual {residual:.3e}"),
            residual,
        });
    }
    let shell_max = u.shell_maxima();
    let r = u.radius as usize;
    let coef = 4.0 * d as f64 - 2.0 + v_inf;
    let slack: Vec<f64> = (1..r).map(|n| coef * shell_max[n] + shell_max[n + 1] - shell_max[n - 1]).collect();
    let violations = (1..r)
        .filter(|&n| shell_max[n - 1] > (coef * shell_max[n] + shell_max[n + 1]) * (1.0 + 1e-12))
        .count();
    if umax == 0.0 {
        return Ok(ShellAudit { shell_max, slack, violations, rate_estimate: f64::NEG_INFINITY, threshold, forces_zero: false, degenerate: true });
    }
    let rate_estimate = (r / 2).max(1)..r;
    let rate_estimate = rate_estimate
        .map(|n| shell_max[n].max(shell_max[n + 1]).ln() / n as f64)
        .fold(f64::INFINITY, f64::min);
    Ok(ShellAudit { shell_max, slack, violations, rate_estimate, threshold, forces_zero: rate_estimate < threshold, degenerate: false })
}

/// Product of one-dimensional bound states `z^{|n_i|}`, `z = 2 - sqrt 3`, with the
/// potential that makes it an exact solution: `-2` per axis, `2 - 2z` on the axis origin.
pub fn separable_bound_state(d: usize, radius: i64) -> (LatticeField, LatticeField) {
    let z = 2.0 - 3f64.sqrt();
    let v1 = |x: i64| if x == 0 { 2.0 - 2.0 * z } else { -2.0 };
    let u = LatticeField::from_fn(d, radius, |n| Complex64::new(n.iter().map(|x| z.powi(x.abs() as i32)).product(), 0.0))
        .expect("valid shape");
    let v = LatticeField::from_fn(d, radius, |n| Complex64::new(n.iter().map(|x| v1(*x)).sum(), 0.0)).expect("valid shape");
    (u, v)
}

/// One-dimensional solution of `u_{n+1} + u_{n-1} - 2u_n + V_n u_n = 0` from `u_0, u_1`;
/// `potential[i]` is `V` at `n = i - radius`.
pub fn recurrence_solution_1d(potential: &[f64], u0: Complex64, u1: Complex64) -> Result<(LatticeField, LatticeField)> {
    if potential.len().is_multiple_of(2) || potential.len() < 5 {
        return Err(Error::InvalidArgument("potential must cover [-R, R] with R >= 2".into()));
    }
    let radius = (potential.len() / 2) as i64;
    let v = |n: i64| potential[(n + radius) as usize];
    let at = |n: i64| (n + radius) as usize;
    let mut u = vec![Complex64::new(0.0, 0.0); potential.len()];
    u[at(0)] = u0;
    u[at(1)] = u1;
    for n in 1..radius {
        u[at(n + 1)] = (2.0 - v(n)) * u[at(n)] - u[at(n - 1)];
    }
    for n in (-radius + 1..=0).rev() {
        u[at(n - 1)] = (2.0 - v(n)) * u[at(n)] - u[at(n + 1)];
    }
    let field = LatticeField::from_fn(1, radius, |n| u[at(n[0])])?;
    let pot = LatticeField::from_fn(1, radius, |n| Complex64::new(v(n[0]), 0.0))?;
    Ok((field, pot))
}

/// CSV with columns `N, shell_max, log_shell_max, inequality_slack` (slack blank at the ends).
pub fn write_shell_csv<W: Write>(audit: &ShellAudit, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["N", "shell_max", "log_shell_max", "inequality_slack"])?;
    for (n, m) in audit.shell_max.iter().enumerate() {
        let slack = if n >= 1 && n <= audit.slack.len() { audit.slack[n - 1].to_string() } else { String::new() };
        wtr.write_record([n.to_string(), m.to_string(), m.ln().to_string(), slack])?;
    }
    wtr.flush()?;
    Ok(())
}
