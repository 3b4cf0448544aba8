//! Integer-order Bessel functions and log-domain decay envelopes.
//!
//! `I_n` and `J_n` come from Miller's backward recurrence. The recurrence keeps a
//! per-entry log scale so that orders far beyond the argument (e.g. `I_200(1)`,
//! about `1e-375`) are still available as [`LogMagnitude`] values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible `|x|`; `e^x` overflows shortly after.
pub const MAX_ARGUMENT: f64 = 700.0;

const RESCALE: f64 = 1e200;

/// A number stored as `phase * exp(log_abs)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogMagnitude {
    pub log_abs: f64,
    pub phase: Complex64,
}

impl LogMagnitude {
    pub fn zero() -> Self {
        Self { log_abs: f64::NEG_INFINITY, phase: Complex64::new(0.0, 0.0) }
    }

    pub fn from_log(log_abs: f64) -> Self {
        Self { log_abs, phase: Complex64::new(1.0, 0.0) }
    }

    pub fn from_complex(z: Complex64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            Self::zero()
        } else {
            Self { log_abs: r.ln(), phase: z / r }
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    /// Materialized value; underflows to zero and overflows to infinity.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.phase * self.log_abs.exp()
    }

    pub fn to_f64(&self) -> f64 {
        self.to_complex().re
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self { log_abs: self.log_abs + other.log_abs, phase: self.phase * other.phase }
    }

    /// Multiplies by `exp(c)` for a complex exponent `c`.
    pub fn mul_exp(&self, c: Complex64) -> Self {
        if self.is_zero() {
            return *self;
        }
        Self { log_abs: self.log_abs + c.re, phase: self.phase * Complex64::from_polar(1.0, c.im) }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Modified,
    Ordinary,
}

struct MillerRun {
    mant: Vec<f64>,
    // number of rescalings applied before the entry was stored
    scale: Vec<i32>,
}

fn miller_backward(kind: Kind, start: usize, x: f64) -> MillerRun {
    let mut mant = vec![0.0; start + 1];
    let mut scale = vec![0i32; start + 1];
    let mut s = 0i32;
    let mut next = 0.0;
    let mut cur = 1.0;
    mant[start] = cur;
    for k in (1..=start).rev() {
        let lower = match kind {
            Kind::Modified => (2.0 * k as f64 / x) * cur + next,
            Kind::Ordinary => (2.0 * k as f64 / x) * cur - next,
        };
        next = cur;
        cur = lower;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            s += 1;
        }
        mant[k - 1] = cur;
        scale[k - 1] = s;
    }
    MillerRun { mant, scale }
}

/// Log-magnitudes of orders `0..=nmax` for `x > 0` from one Miller run.
fn normalized(kind: Kind, start: usize, nmax: usize, x: f64) -> Vec<LogMagnitude> {
    let run = miller_backward(kind, start, x);
    let s0 = run.scale[0];
    let rel = |k: usize| run.mant[k] * (f64::from(run.scale[k] - s0) * RESCALE.ln()).exp();
    let mut sum = rel(0);
    for k in 1..=start {
        match kind {
            Kind::Modified => sum += 2.0 * rel(k),
            Kind::Ordinary if k % 2 == 0 => sum += 2.0 * rel(k),
            Kind::Ordinary => {}
        }
    }
    let base = match kind {
        Kind::Modified => x,
        Kind::Ordinary => 0.0,
    };
    (0..=nmax)
        .map(|k| {
            let m = run.mant[k];
            if m == 0.0 {
                return LogMagnitude::zero();
            }
            let sign = (m * sum).signum();
            let ratio = rel(k) / sum;
            let log_ratio = if ratio.is_normal() {
                ratio.abs().ln()
            } else {
                m.abs().ln() + f64::from(run.scale[k] - s0) * RESCALE.ln() - sum.abs().ln()
            };
            LogMagnitude { log_abs: log_ratio + base, phase: Complex64::new(sign, 0.0) }
        })
        .collect()
}

fn runs_agree(kind: Kind, a: &[LogMagnitude], b: &[LogMagnitude]) -> bool {
    a.iter().zip(b).all(|(p, q)| {
        if p.is_zero() || q.is_zero() {
            return p.is_zero() == q.is_zero() || (p.log_abs.max(q.log_abs) < -700.0);
        }
        let close_log = (p.log_abs - q.log_abs).abs() <= 1e-13 * p.log_abs.abs().max(1.0) && p.phase == q.phase;
        let close_abs = kind == Kind::Ordinary && (p.to_f64() - q.to_f64()).abs() <= 1e-16;
        close_log || close_abs
    })
}

fn sequence(kind: Kind, nmax: usize, x: f64) -> Result<Vec<LogMagnitude>> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::Overflow(format!("Bessel argument {x} exceeds |x| <= {MAX_ARGUMENT}")));
    }
    if x == 0.0 {
        let mut out = vec![LogMagnitude::zero(); nmax + 1];
        out[0] = LogMagnitude::from_log(0.0);
        return Ok(out);
    }
    let ax = x.abs();
    let mut start = 2 * nmax.max(ax.ceil() as usize) + 40;
    let mut prev = normalized(kind, start, nmax, ax);
    let mut converged = false;
    for _ in 0..8 {
        start *= 2;
        let next = normalized(kind, start, nmax, ax);
        let agree = runs_agree(kind, &prev, &next);
        prev = next;
        if agree {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric(format!("Miller recurrence did not settle for x = {x}, n <= {nmax}")));
    }
    if x < 0.0 {
        for (n, v) in prev.iter_mut().enumerate() {
            if n % 2 == 1 {
                v.phase = -v.phase;
            }
        }
    }
    Ok(prev)
}

/// `ln I_n(x)` with sign, for `n = 0..=nmax`.
pub fn bessel_i_log_sequence(nmax: usize, x: f64) -> Result<Vec<LogMagnitude>> {
    sequence(Kind::Modified, nmax, x)
}

/// `ln J_n(x)` with sign, for `n = 0..=nmax`.
pub fn bessel_j_log_sequence(nmax: usize, x: f64) -> Result<Vec<LogMagnitude>> {
    sequence(Kind::Ordinary, nmax, x)
}

pub fn bessel_i_sequence(nmax: usize, x: f64) -> Result<Vec<f64>> {
    Ok(bessel_i_log_sequence(nmax, x)?.iter().map(LogMagnitude::to_f64).collect())
}

pub fn bessel_j_sequence(nmax: usize, x: f64) -> Result<Vec<f64>> {
    Ok(bessel_j_log_sequence(nmax, x)?.iter().map(LogMagnitude::to_f64).collect())
}

pub fn bessel_i_log(n: usize, x: f64) -> Result<LogMagnitude> {
    Ok(bessel_i_log_sequence(n, x)?[n])
}

pub fn bessel_j_log(n: usize, x: f64) -> Result<LogMagnitude> {
    Ok(bessel_j_log_sequence(n, x)?[n])
}

/// Modified Bessel function of the first kind, `I_n(x)`.
pub fn bessel_i(n: usize, x: f64) -> Result<f64> {
    Ok(bessel_i_log(n, x)?.to_f64())
}

/// Bessel function of the first kind, `J_n(x)`.
pub fn bessel_j(n: usize, x: f64) -> Result<f64> {
    Ok(bessel_j_log(n, x)?.to_f64())
}

/// `i^n`.
pub fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `I_n(iy) = i^n J_n(y)` on the imaginary axis, for `n = 0..=nmax`.
pub fn bessel_i_imaginary_log_sequence(nmax: usize, y: f64) -> Result<Vec<LogMagnitude>> {
    let j = bessel_j_log_sequence(nmax, y)?;
    Ok(j.into_iter()
        .enumerate()
        .map(|(n, v)| if v.is_zero() { v } else { LogMagnitude { log_abs: v.log_abs, phase: v.phase * i_pow(n as i64) } })
        .collect())
}

/// Power series `sum_k (x/2)^(n+2k) / (k! (n+k)!)`; reliable for moderate `|x|`.
pub fn bessel_i_series(n: usize, x: f64) -> f64 {
    power_series(n, x, 1.0)
}

/// Alternating power series for `J_n`; reliable for moderate `|x|`.
pub fn bessel_j_series(n: usize, x: f64) -> f64 {
    power_series(n, x, -1.0)
}

fn power_series(n: usize, x: f64, sign: f64) -> f64 {
    let h = x / 2.0;
    let mut term = 1.0;
    for i in 1..=n {
        term *= h / i as f64;
    }
    let mut sum = term;
    for k in 1..500 {
        term *= sign * h * h / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `ln C + k (1 + ln T + ln delta - ln(2 + eps) - ln k)`, the two-time critical
/// decay envelope at band step `k` (for `k = 0` the value is `ln C`).
pub fn log_envelope(k: u64, t: f64, delta: f64, eps: f64, c: f64) -> LogMagnitude {
    assert!(t > 0.0 && delta > 0.0 && eps >= 0.0 && c > 0.0, "envelope parameters out of range");
    if k == 0 {
        return LogMagnitude::from_log(c.ln());
    }
    let kf = k as f64;
    LogMagnitude::from_log(c.ln() + kf * (1.0 + t.ln() + delta.ln() - (2.0 + eps).ln() - kf.ln()))
}

/// `-(1/2) ln q + q (1 + ln T - ln 2 - ln q)`, the size of `|u_q(0)| + |u_q(T)|`
/// for the Bessel heat model centred at `T/2`, up to a bounded factor.
pub fn model_envelope(q: u64, t: f64) -> LogMagnitude {
    assert!(q >= 1 && t > 0.0, "model envelope needs q >= 1 and T > 0");
    let qf = q as f64;
    LogMagnitude::from_log(-0.5 * qf.ln() + qf * (1.0 + t.ln() - std::f64::consts::LN_2 - qf.ln()))
}
