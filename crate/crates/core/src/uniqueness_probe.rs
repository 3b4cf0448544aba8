//! Pairing of lattice states with generalized eigenvectors, and the audits
//! built on it: the exponential law `phi(t, lambda) = e^{lambda t} phi(0, lambda)`,
//! growth bounds, indicator slopes along rays and two-time decay margins.
//!
//! Convention: `phi(u, lambda) = sum_j <u_j, e_j>` (linear in `u`) with `e` the
//! eigenvector of `A*` at `conj(lambda)`. Then `d/dt phi = <A u, e> = <u, A* e> = lambda phi`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen_engine::{extend_eigenvector, unit_seeds, EigenFamily};
use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::favard::TAIL_RTOL;
use crate::lattice_ops::BandedOperator;
use crate::special_fn::{log_envelope, LogMagnitude};
use crate::state::LatticeState;
use crate::stats::{linear_fit, CompensatedSum};

/// Smallest denominator, in log form, for relative defects.
pub const LOG_FLOOR: f64 = -690.0;

/// First audited shell of the decay audit.
pub const FIRST_AUDITED_SHELL: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSample {
    pub lambda: Complex64,
    pub t: f64,
    pub value: LogMagnitude,
    pub truncation_warning: bool,
}

/// `ln |a - b|` without materializing either value.
pub fn log_abs_diff(a: &LogMagnitude, b: &LogMagnitude) -> f64 {
    let m = a.log_abs.max(b.log_abs);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let part = |x: &LogMagnitude| if x.is_zero() { Complex64::new(0.0, 0.0) } else { x.phase * (x.log_abs - m).exp() };
    let d = (part(a) - part(b)).norm();
    if d == 0.0 {
        f64::NEG_INFINITY
    } else {
        d.ln() + m
    }
}

/// Family whose pairing gives `phi(., lambda)`.
pub fn probe_family(a: &BandedOperator, seeds: &[Vec<Complex64>], lambda: Complex64) -> Result<EigenFamily> {
    extend_eigenvector(a, seeds, lambda.conj())
}

/// `sum_j <u_j, e_j>`, accumulated index-ascending against a common log scale.
pub fn phi(u: &LatticeState, fam: &EigenFamily) -> Result<PhiSample> {
    if u.window() != fam.window() || u.block_dim() != fam.block_dim() {
        return Err(Error::InvalidArgument("state and eigenvector live on different windows".into()));
    }
    let w = u.window();
    let terms: Vec<(Complex64, f64)> = w
        .indices()
        .map(|j| {
            let (e, sc) = fam.scaled_block(j);
            let z: Complex64 = u.block(j).iter().zip(e).map(|(x, y)| x * y.conj()).sum();
            (z, sc)
        })
        .collect();
    let logs: Vec<f64> = terms
        .iter()
        .map(|(z, sc)| if z.norm() == 0.0 { f64::NEG_INFINITY } else { z.norm().ln() + sc })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda = fam.lambda().conj();
    if top == f64::NEG_INFINITY {
        return Ok(PhiSample { lambda, t: u.t, value: LogMagnitude::zero(), truncation_warning: false });
    }
    let mut sum = CompensatedSum::default();
    let (mut total, mut tail) = (0.0, 0.0);
    let edge = 10 * fam.s() as i64;
    for (j, ((z, sc), l)) in w.indices().zip(terms.iter().zip(&logs)) {
        if *l == f64::NEG_INFINITY {
            continue;
        }
        sum.add(z * (sc - top).exp());
        let mag = (l - top).exp();
        total += mag;
        if w.edge_distance(j) < edge {
            tail += mag;
        }
    }
    let mut value = LogMagnitude::from_complex(sum.value());
    if !value.is_zero() {
        value.log_abs += top;
    }
    Ok(PhiSample { lambda, t: u.t, value, truncation_warning: tail > TAIL_RTOL * total })
}

/// `phi(u, lambda)` for each state, building the family once.
pub fn phi_along(states: &[LatticeState], a: &BandedOperator, seeds: &[Vec<Complex64>], lambda: Complex64) -> Result<Vec<PhiSample>> {
    let fam = probe_family(a, seeds, lambda)?;
    states.iter().map(|u| phi(u, &fam)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntireReport {
    pub max_defect: f64,
    pub worst_lambda: Complex64,
    pub worst_t: f64,
    /// True if any pairing had a non-negligible contribution near the window edge.
    pub boundary_spill: bool,
    pub samples: Vec<PhiSample>,
}

/// Max relative defect of `phi(t, lambda)` against `e^{lambda t} phi(t_0, lambda)`
/// over the trajectory and the grid.
pub fn check_entire_identity(
    traj: &Trajectory,
    a: &BandedOperator,
    seeds: &[Vec<Complex64>],
    lambda_grid: &[Complex64],
) -> Result<EntireReport> {
    let per_lambda: Vec<Vec<PhiSample>> = lambda_grid
        .par_iter()
        .map(|&lam| phi_along(&traj.states, a, seeds, lam))
        .collect::<Result<_>>()?;
    let mut report = EntireReport {
        max_defect: 0.0,
        worst_lambda: lambda_grid.first().copied().unwrap_or_default(),
        worst_t: traj.times[0],
        boundary_spill: false,
        samples: Vec::new(),
    };
    for (lam, samples) in lambda_grid.iter().zip(per_lambda) {
        let first = samples[0];
        for s in &samples {
            let expected = first.value.mul_exp(lam * (s.t - first.t));
            let denom = expected.log_abs.max(LOG_FLOOR);
            let defect = (log_abs_diff(&s.value, &expected) - denom).exp();
            if defect > report.max_defect {
                report.max_defect = defect;
                report.worst_lambda = *lam;
                report.worst_t = s.t;
            }
            report.boundary_spill |= s.truncation_warning;
        }
        report.samples.extend(samples);
    }
    Ok(report)
}

/// CSV with columns `lambda_re, lambda_im, t, log_abs, arg`.
pub fn write_phi_csv<W: Write>(samples: &[PhiSample], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["lambda_re", "lambda_im", "t", "log_abs", "arg"])?;
    for s in samples {
        let arg = if s.value.is_zero() { 0.0 } else { s.value.phase.arg() };
        wtr.serialize((s.lambda.re, s.lambda.im, s.t, s.value.log_abs, arg))?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SuperCritical,
    Critical,
    SubCritical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub shells: Vec<u64>,
    /// `ln max(|u(0)|, |u(T)|)` over each shell.
    pub observed: Vec<f64>,
    /// Envelope logs at level `eps` without the constant.
    pub envelope: Vec<f64>,
    /// Calibrated constants, at level `eps` and at level 0.
    pub log_c: f64,
    pub log_c_critical: f64,
    /// Margins against the calibrated envelope at level `eps`, and at level 0.
    pub margins: Vec<f64>,
    pub critical_margins: Vec<f64>,
    pub verdict: Verdict,
}

/// Shell of index `j`: `|floor(j / s)|`.
pub fn shell_of(j: i64, s: usize) -> u64 {
    j.div_euclid(s as i64).unsigned_abs()
}

fn shell_maxima(u: &LatticeState, s: usize) -> Vec<f64> {
    let w = u.window();
    let kmax = w.indices().map(|j| shell_of(j, s)).max().unwrap_or(0) as usize;
    let mut out = vec![f64::NEG_INFINITY; kmax + 1];
    for j in w.indices() {
        let n = u.block_norm(j);
        if n > 0.0 {
            let k = shell_of(j, s) as usize;
            out[k] = out[k].max(n.ln());
        }
    }
    out
}

/// Largest shell fully covered on both sides of the window.
pub fn full_shell_limit(u: &LatticeState, s: usize) -> u64 {
    let w = u.window();
    let s = s as i64;
    let right = (w.hi + 1) / s - 1;
    let left = -w.lo / s;
    right.min(left).max(0) as u64
}

/// Audits shells `FIRST_AUDITED_SHELL..` up to the last full shell.
pub fn decay_audit(u0: &LatticeState, ut: &LatticeState, t: f64, delta: f64, eps: f64, s: usize) -> Result<DecayReport> {
    let kmax = full_shell_limit(u0, s);
    decay_audit_in(u0, ut, t, delta, eps, s, (FIRST_AUDITED_SHELL, kmax))
}

/// Two-time decay margins over the shells `range.0..=range.1`.
///
/// The constant of each envelope is calibrated at the first shell with data.
/// Verdicts: `super_critical` if some level-0 margin exceeds `ln k + 5`;
/// `sub_critical` for zero data, or when every level-`eps` margin is at most 0
/// and the level-0 margin at the last shell is below `-(ln k + 5)`;
/// `critical` otherwise.
pub fn decay_audit_in(
    u0: &LatticeState,
    ut: &LatticeState,
    t: f64,
    delta: f64,
    eps: f64,
    s: usize,
    range: (u64, u64),
) -> Result<DecayReport> {
    u0.check_compatible(ut)?;
    if !(t > 0.0 && delta > 0.0 && eps >= 0.0) || s == 0 {
        return Err(Error::InvalidArgument("decay audit needs T > 0, delta > 0, eps >= 0, s >= 1".into()));
    }
    let (k0, k1) = range;
    if k0 == 0 || k1 < k0 || k1 > full_shell_limit(u0, s) {
        return Err(Error::InvalidArgument(format!("shell range {k0}..={k1} not inside the window")));
    }
    let a = shell_maxima(u0, s);
    let b = shell_maxima(ut, s);
    let shells: Vec<u64> = (k0..=k1).collect();
    let observed: Vec<f64> = shells.iter().map(|&k| a[k as usize].max(b[k as usize])).collect();
    let envelope: Vec<f64> = shells.iter().map(|&k| log_envelope(k, t, delta, eps, 1.0).log_abs).collect();
    let critical: Vec<f64> = shells.iter().map(|&k| log_envelope(k, t, delta, 0.0, 1.0).log_abs).collect();
    let first = observed.iter().position(|o| o.is_finite());
    let Some(i0) = first else {
        let zeros = vec![f64::NEG_INFINITY; shells.len()];
        return Ok(DecayReport {
            shells,
            observed,
            envelope,
            log_c: 0.0,
            log_c_critical: 0.0,
            margins: zeros.clone(),
            critical_margins: zeros,
            verdict: Verdict::SubCritical,
        });
    };
    let log_c = observed[i0] - envelope[i0];
    let log_c_critical = observed[i0] - critical[i0];
    let margins: Vec<f64> = observed.iter().zip(&envelope).map(|(o, e)| o - (log_c + e)).collect();
    let critical_margins: Vec<f64> = observed.iter().zip(&critical).map(|(o, e)| o - (log_c_critical + e)).collect();
    let band = |k: u64| (k as f64).ln() + 5.0;
    let verdict = if shells.iter().zip(&critical_margins).any(|(&k, m)| *m > band(k)) {
        Verdict::SuperCritical
    } else if margins.iter().all(|m| *m <= 1e-9) && *critical_margins.last().unwrap() < -band(k1) {
        Verdict::SubCritical
    } else {
        Verdict::Critical
    };
    Ok(DecayReport { shells, observed, envelope, log_c, log_c_critical, margins, critical_margins, verdict })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub holds: bool,
    /// Largest `ln |phi| - (ln C + T |lambda| / (2 + eps)) - 2 ln(1 + |lambda|)`.
    pub worst_margin: f64,
    pub log_c_fit: f64,
}

/// Checks `|phi(0, lambda)|, |phi(T, lambda)| <= C e^{T |lambda| / (2 + eps)}` on the
/// grid for every unit-seed family, with `C` fitted at `lambda = 0` and a
/// polynomial allowance `(1 + |lambda|)^2`.
pub fn growth_bound_check(
    u0: &LatticeState,
    ut: &LatticeState,
    a: &BandedOperator,
    t: f64,
    eps: f64,
    lambda_grid: &[Complex64],
) -> Result<GrowthCheck> {
    let consts = a.audit_constants()?;
    let audit = decay_audit(u0, ut, t, consts.delta, eps, a.s())?;
    if audit.verdict != Verdict::SubCritical {
        let worst = audit.margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::Precondition {
            message: format!("data is {:?} at level eps = {eps}, not sub-critical", audit.verdict),
            residual: worst,
        });
    }
    let s = a.s() as i64;
    let m = a.block_dim();
    let mut x = vec![Complex64::new(0.0, 0.0); m];
    x[0] = Complex64::new(1.0, 0.0);
    let seeds: Vec<_> = (-s..s).map(|r| unit_seeds(a.s(), m, r, &x)).collect();
    let states = [u0.clone(), ut.clone()];
    let log_phi = |lam: Complex64| -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        for sd in &seeds {
            for p in phi_along(&states, a, sd, lam)? {
                best = best.max(p.value.log_abs);
            }
        }
        Ok(best)
    };
    let log_c_fit = log_phi(Complex64::new(0.0, 0.0))?;
    if log_c_fit == f64::NEG_INFINITY {
        let all_zero = lambda_grid.iter().map(|&l| log_phi(l)).collect::<Result<Vec<_>>>()?;
        let holds = all_zero.iter().all(|v| *v == f64::NEG_INFINITY);
        return Ok(GrowthCheck { holds, worst_margin: if holds { f64::NEG_INFINITY } else { f64::INFINITY }, log_c_fit });
    }
    let margins: Vec<f64> = lambda_grid
        .par_iter()
        .map(|&lam| {
            let r = lam.norm();
            Ok(log_phi(lam)? - (log_c_fit + t * r / (2.0 + eps)) - 2.0 * (1.0 + r).ln())
        })
        .collect::<Result<_>>()?;
    let worst_margin = margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(GrowthCheck { holds: worst_margin <= 0.0, worst_margin, log_c_fit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorEstimate {
    pub theta: f64,
    /// Least-squares slope of `ln |phi(r e^{i theta})|` against `r`; a finite-range
    /// stand-in for the limsup defining the indicator.
    pub slope: f64,
    pub r_range: (f64, f64),
    /// All samples were zero; `slope` is meaningless.
    pub undefined: bool,
    /// `|slope| <= 0.05`, typical of zero exponential type.
    pub near_zero: bool,
}

/// Fits the growth rate along a ray from `(r, ln |phi|)` samples.
pub fn indicator_estimate(theta: f64, radii: &[f64], log_abs: &[f64]) -> Result<IndicatorEstimate> {
    if radii.len() != log_abs.len() || radii.len() < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 radii with matching samples, got {}", radii.len())));
    }
    let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = radii.iter().zip(log_abs).filter(|(_, y)| y.is_finite()).map(|(x, y)| (*x, *y)).unzip();
    match linear_fit(&xs, &ys) {
        Some((slope, _)) => Ok(IndicatorEstimate { theta, slope, r_range: (lo, hi), undefined: false, near_zero: slope.abs() <= 0.05 }),
        None => Ok(IndicatorEstimate { theta, slope: 0.0, r_range: (lo, hi), undefined: true, near_zero: true }),
    }
}

/// `phi(u, r e^{i theta})` for each radius.
pub fn phi_on_ray(u: &LatticeState, a: &BandedOperator, seeds: &[Vec<Complex64>], theta: f64, radii: &[f64]) -> Result<Vec<PhiSample>> {
    radii
        .par_iter()
        .map(|&r| {
            let fam = probe_family(a, seeds, Complex64::from_polar(r, theta))?;
            phi(u, &fam)
        })
        .collect()
}

/// `sqrt(sum_m (1 + |m|)^alpha |c_m|^2)` with `|m|` the Euclidean length of the site.
pub fn weighted_alpha_norm(c: &[Complex64], sites: &[Vec<i64>], alpha: f64) -> Result<f64> {
    if c.len() != sites.len() {
        return Err(Error::InvalidArgument("one site per coordinate required".into()));
    }
    let sum: f64 = c
        .iter()
        .zip(sites)
        .map(|(z, m)| {
            let len = m.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
            (1.0 + len).powf(alpha) * z.norm_sqr()
        })
        .sum();
    Ok(sum.sqrt())
}

/// `sqrt(sum_k e^{|k|^{1/2}} ||c_k||_alpha^2)` over lattice-indexed blocks.
pub fn rigged_norm(blocks: &[(i64, Vec<Complex64>)], sites: &[Vec<i64>], alpha: f64) -> Result<f64> {
    let mut sum = 0.0;
    for (k, c) in blocks {
        let n = weighted_alpha_norm(c, sites, alpha)?;
        sum += ((k.unsigned_abs() as f64).sqrt()).exp() * n * n;
    }
    Ok(sum.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorEntry {
    pub theta: f64,
    pub slope: f64,
}

/// Per-experiment JSON report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub experiment: String,
    pub defect_max: Option<f64>,
    pub verdict: Option<Verdict>,
    pub indicator: Vec<IndicatorEntry>,
    pub margins: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{model_solution_heat, propagate, time_grid};
    use crate::lattice_ops::build_laplacian_1d;
    use crate::special_fn::log_envelope;
    use crate::state::Window;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Vec<Complex64> {
        vec![c(1.0, 0.0)]
    }

    #[test]
    fn pairing_basics() {
        let a = build_laplacian_1d(c(1.0, 0.0), Window::centered(20)).unwrap();
        let w = a.window();
        let seeds = unit_seeds(1, 1, 0, &one());
        let fam = probe_family(&a, &seeds, c(0.0, 0.0)).unwrap();
        assert_eq!(fam.at(3), c(4.0, 0.0));
        let p = phi(&LatticeState::delta(w, 0, 0.0).unwrap(), &fam).unwrap();
        assert_eq!(p.value.to_complex(), c(1.0, 0.0));
        assert!(phi(&LatticeState::zeros(w, 1, 0.0), &fam).unwrap().value.is_zero());
        let u = LatticeState::from_fn(w, 0.0, |j| c((-(j * j) as f64).exp(), 0.3 * j as f64));
        let alpha = c(0.4, -1.3);
        let fam = probe_family(&a, &seeds, c(0.7, 0.2)).unwrap();
        let lhs = phi(&u.scaled(alpha), &fam).unwrap().value.to_complex();
        let rhs = alpha * phi(&u, &fam).unwrap().value.to_complex();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn derivative_follows_lambda() {
        // d/dt phi = <A u, e> must equal lambda <u, e>
        let a = build_laplacian_1d(c(1.0, 0.0), Window::centered(40)).unwrap();
        let u = LatticeState::from_fn(a.window(), 0.0, |j| c((-(j * j) as f64 / 4.0).exp(), 0.0));
        let au = a.apply(&u).unwrap();
        let seeds = unit_seeds(1, 1, 0, &one());
        for lam in [c(0.5, 1.0), c(-1.0, -0.3)] {
            let fam = probe_family(&a, &seeds, lam).unwrap();
            let lhs = phi(&au, &fam).unwrap().value.to_complex();
            let rhs = lam * phi(&u, &fam).unwrap().value.to_complex();
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm());
        }
    }

    #[test]
    fn entire_identity_on_small_window() {
        let a = build_laplacian_1d(c(1.0, 0.0), Window::centered(60)).unwrap();
        let u0 = LatticeState::delta(a.window(), 0, 0.0).unwrap();
        let traj = propagate(&a, &u0, &time_grid(0.0, 1.0, 5)).unwrap();
        let seeds = unit_seeds(1, 1, 0, &one());
        let grid = [c(0.0, 0.0), c(1.0, 1.0), c(-2.0, 0.0), c(0.0, 2.0)];
        let rep = check_entire_identity(&traj, &a, &seeds, &grid).unwrap();
        assert!(rep.max_defect < 1e-8, "{}", rep.max_defect);
        let first = check_entire_identity(
            &Trajectory { operator: a.clone(), times: vec![0.0], states: vec![u0] },
            &a,
            &seeds,
            &grid,
        )
        .unwrap();
        assert_eq!(first.max_defect, 0.0);
        let flat: Vec<_> = rep.samples.iter().filter(|s| s.lambda == c(0.0, 0.0)).collect();
        for s in &flat {
            assert!((s.value.to_complex() - flat[0].value.to_complex()).norm() < 1e-8);
        }
    }

    #[test]
    fn log_difference() {
        let a = LogMagnitude::from_complex(c(3.0, 4.0)).mul_exp(c(800.0, 0.0));
        let b = LogMagnitude::from_complex(c(3.0, 0.0)).mul_exp(c(800.0, 0.0));
        assert!((log_abs_diff(&a, &b) - (4.0f64.ln() + 800.0)).abs() < 1e-12);
        assert_eq!(log_abs_diff(&LogMagnitude::zero(), &LogMagnitude::zero()), f64::NEG_INFINITY);
    }

    fn synthetic(window: Window, t: f64, eps: f64) -> LatticeState {
        LatticeState::from_fn(window, 0.0, |j| c(log_envelope(j.unsigned_abs(), t, 1.0, eps, 1.0).log_abs.exp(), 0.0))
    }

    #[test]
    fn decay_verdicts() {
        let w = Window::centered(60);
        let z = LatticeState::zeros(w, 1, 0.0);
        assert_eq!(decay_audit(&z, &z, 1.0, 1.0, 0.5, 1).unwrap().verdict, Verdict::SubCritical);
        let syn = synthetic(w, 1.0, 1.0);
        assert_eq!(decay_audit(&syn, &syn, 1.0, 1.0, 1.0, 1).unwrap().verdict, Verdict::SubCritical);
        let u0 = model_solution_heat(c(1.0, 0.0), 0.0, 0.5, w).unwrap();
        let ut = model_solution_heat(c(1.0, 0.0), 1.0, 0.5, w).unwrap();
        for eps in [0.0, 0.1, 1.0] {
            let rep = decay_audit_in(&u0, &ut, 1.0, 1.0, eps, 1, (10, 50)).unwrap();
            assert_eq!(rep.verdict, Verdict::Critical, "eps={eps}");
        }
        let slow = LatticeState::from_fn(w, 0.0, |j| c((-(j.abs() as f64)).exp(), 0.0));
        assert_eq!(decay_audit(&slow, &slow, 1.0, 1.0, 0.1, 1).unwrap().verdict, Verdict::SuperCritical);
        assert!(decay_audit_in(&z, &z, 1.0, 1.0, 0.1, 1, (5, 61)).is_err());
    }

    #[test]
    fn growth_bound() {
        let w = Window::centered(100);
        let a = build_laplacian_1d(c(1.0, 0.0), w).unwrap();
        let grid: Vec<Complex64> =
            (0..16).map(|i| Complex64::from_polar(10.0 * (1 + i % 4) as f64 / 4.0, i as f64 * 0.7)).collect();
        let z = LatticeState::zeros(w, 1, 0.0);
        assert!(growth_bound_check(&z, &z, &a, 1.0, 1.0, &grid).unwrap().holds);
        let syn = synthetic(w, 1.0, 1.0);
        let g = growth_bound_check(&syn, &syn, &a, 1.0, 1.0, &grid).unwrap();
        assert!(g.holds, "{g:?}");
        let u0 = model_solution_heat(c(1.0, 0.0), 0.0, 0.5, w).unwrap();
        let ut = model_solution_heat(c(1.0, 0.0), 1.0, 0.5, w).unwrap();
        let r = growth_bound_check(&u0, &ut, &a, 1.0, 0.0, &grid);
        assert!(matches!(r, Err(Error::Precondition { .. })), "{r:?}");
    }

    #[test]
    fn indicator_fits() {
        let radii: Vec<f64> = (1..=10).map(|r| r as f64).collect();
        let logs: Vec<f64> = radii.iter().map(|r| (Complex64::new(*r, 0.0) * 1.7).re).collect();
        let est = indicator_estimate(0.0, &radii, &logs).unwrap();
        assert!((est.slope - 1.7).abs() < 1e-6);
        assert_eq!(est.r_range, (1.0, 10.0));
        let zero = indicator_estimate(0.0, &radii, &[f64::NEG_INFINITY; 10]).unwrap();
        assert!(zero.undefined);
        assert!(indicator_estimate(0.0, &radii[..5], &logs[..5]).is_err());
        let big: Vec<f64> = (0..10).map(|i| 200.0 + 20.0 * i as f64).collect();
        let poly: Vec<f64> = big.iter().map(|r| 3.0 * r.ln()).collect();
        assert!(indicator_estimate(0.0, &big, &poly).unwrap().near_zero);
    }

    #[test]
    fn indicator_shift_on_heat_model() {
        let w = Window::centered(200);
        let a = build_laplacian_1d(c(1.0, 0.0), w).unwrap();
        let u0 = model_solution_heat(c(1.0, 0.0), 0.0, 0.5, w).unwrap();
        let ut = model_solution_heat(c(1.0, 0.0), 1.0, 0.5, w).unwrap();
        let seeds = unit_seeds(1, 1, 0, &one());
        let radii: Vec<f64> = (0..10).map(|i| 8.0 + 1.2 * i as f64).collect();
        let fit = |u: &LatticeState| {
            let logs: Vec<f64> = phi_on_ray(u, &a, &seeds, 0.0, &radii).unwrap().iter().map(|p| p.value.log_abs).collect();
            indicator_estimate(0.0, &radii, &logs).unwrap().slope
        };
        assert!((fit(&ut) - fit(&u0) - 1.0).abs() < 0.1);
    }

    #[test]
    fn weighted_norms() {
        let sites = vec![vec![0], vec![1]];
        let v = [c(1.0, 0.0), c(1.0, 0.0)];
        assert!((weighted_alpha_norm(&v, &sites, 2.0).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert!((weighted_alpha_norm(&v, &sites, 0.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let single = weighted_alpha_norm(&[c(0.0, 3.0)], &[vec![-4]], 1.5).unwrap();
        assert!((single - 5f64.powf(0.75) * 3.0).abs() < 1e-12);
        let r = rigged_norm(&[(0, v.to_vec()), (4, v.to_vec())], &sites, 0.0).unwrap();
        assert!((r - (2.0 + 2.0 * 2f64.exp()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn phi_csv_columns() {
        let s = PhiSample { lambda: c(1.0, -1.0), t: 0.5, value: LogMagnitude::from_complex(c(0.0, 2.0)), truncation_warning: false };
        let mut buf = Vec::new();
        write_phi_csv(&[s], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lambda_re,lambda_im,t,log_abs,arg\n1.0,-1.0,0.5,"));
    }
}
