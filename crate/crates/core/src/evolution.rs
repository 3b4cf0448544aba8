//! Time evolution `du/dt = A u` on a window, closed-form Bessel model solutions
//! and the weighted energy `f_B(t) = sum_j B^|j| ||u_j(t)||^2`.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::lattice_ops::BandedOperator;
use crate::special_fn::{bessel_i_log_sequence, bessel_j_log_sequence, i_pow, LogMagnitude};
use crate::state::{LatticeState, Window, STATE_CSV_HEADER};
use crate::stats::log_sum_exp;

/// Largest dense dimension `window * m` the propagator accepts.
pub const MAX_DENSE_DIM: usize = 2048;

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub operator: BandedOperator,
    pub times: Vec<f64>,
    pub states: Vec<LatticeState>,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(STATE_CSV_HEADER)?;
        for st in &self.states {
            st.write_rows(&mut wtr, &[])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn first(&self) -> &LatticeState {
        &self.states[0]
    }

    pub fn last(&self) -> &LatticeState {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Evaluates `u(t) = exp((t - t_0) A) u_0` at every requested time.
///
/// One dense exponential is formed per distinct step length and the steps are
/// applied in order, so equispaced grids cost a single exponential.
pub fn propagate(a: &BandedOperator, u0: &LatticeState, times: &[f64]) -> Result<Trajectory> {
    if u0.window() != a.window() || u0.block_dim() != a.block_dim() {
        return Err(Error::InvalidArgument("initial state does not live on the operator window".into()));
    }
    if times.is_empty() || times[0] != u0.t {
        return Err(Error::InvalidArgument(format!("times must start at the initial time {}", u0.t)));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be finite and strictly increasing".into()));
    }
    let dim = a.window().len() * a.block_dim();
    if times.len() > 1 && dim > MAX_DENSE_DIM {
        return Err(Error::Resource(format!("dense dimension {dim} exceeds {MAX_DENSE_DIM}")));
    }
    let mut states = vec![u0.clone()];
    if times.len() > 1 {
        let dense = a.to_dense();
        let mut cache: HashMap<u64, DMatrix<Complex64>> = HashMap::new();
        let mut v = DVector::from_column_slice(u0.values());
        for w in times.windows(2) {
            let dt = w[1] - w[0];
            let e = match cache.get(&dt.to_bits()) {
                Some(e) => e,
                None => {
                    let e = expm(&(&dense * Complex64::new(dt, 0.0)))?;
                    cache.entry(dt.to_bits()).or_insert(e)
                }
            };
            v = e * v;
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Numeric(format!("non-finite state at t = {}", w[1])));
            }
            states.push(LatticeState::from_values(a.window(), a.block_dim(), w[1], v.iter().copied().collect())?);
        }
    }
    Ok(Trajectory { operator: a.clone(), times: times.to_vec(), states })
}

/// `n` equispaced times on `[t0, t1]`.
pub fn time_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![t0];
    }
    (0..n).map(|i| if i + 1 == n { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 }).collect()
}

fn max_order(window: Window) -> usize {
    window.lo.unsigned_abs().max(window.hi.unsigned_abs()) as usize
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Axis {
    Real(f64),
    Imaginary(f64),
}

fn axis_of(alpha: Complex64) -> Result<Axis> {
    if alpha.im == 0.0 {
        Ok(Axis::Real(alpha.re))
    } else if alpha.re == 0.0 {
        Ok(Axis::Imaginary(alpha.im))
    } else {
        Err(Error::Unsupported(format!("heat model needs real or purely imaginary alpha, got {alpha}")))
    }
}

/// `I_|n|(z)` for `z = 2 alpha tau` on the real or imaginary axis, `n = 0..=nmax`.
fn modified_bessel_on_axis(nmax: usize, axis: Axis, tau: f64) -> Result<Vec<LogMagnitude>> {
    match axis {
        Axis::Real(a) => bessel_i_log_sequence(nmax, 2.0 * a * tau),
        Axis::Imaginary(b) => {
            let j = bessel_j_log_sequence(nmax, 2.0 * b * tau)?;
            Ok(j.into_iter()
                .enumerate()
                .map(|(n, v)| if v.is_zero() { v } else { LogMagnitude { log_abs: v.log_abs, phase: v.phase * i_pow(n as i64) } })
                .collect())
        }
    }
}

/// Log-domain values `I_n(2 alpha (t - t0)) e^{-2 alpha (t - t0)}` over the window.
pub fn model_solution_heat_log(alpha: Complex64, t: f64, t0: f64, window: Window) -> Result<Vec<LogMagnitude>> {
    let axis = axis_of(alpha)?;
    let tau = t - t0;
    let seq = modified_bessel_on_axis(max_order(window), axis, tau)?;
    let damp = -2.0 * alpha * tau;
    Ok(window.indices().map(|n| seq[n.unsigned_abs() as usize].mul_exp(damp)).collect())
}

/// Heat-type model `u_n(t) = I_n(2 alpha (t - t0)) e^{-2 alpha (t - t0)}`, a solution
/// of `du/dt = alpha Delta_1 u` with `u(t0) = delta_0`.
pub fn model_solution_heat(alpha: Complex64, t: f64, t0: f64, window: Window) -> Result<LatticeState> {
    let logs = model_solution_heat_log(alpha, t, t0, window)?;
    LatticeState::from_values(window, 1, t, logs.iter().map(LogMagnitude::to_complex).collect())
}

/// Time derivative of the heat model through `I_n'(x) = I_{n+1}(x) + (n/x) I_n(x)`
/// (and `J_n'(y) = (n/y) J_n(y) - J_{n+1}(y)` on the imaginary axis).
pub fn model_solution_heat_derivative(alpha: Complex64, t: f64, t0: f64, window: Window) -> Result<LatticeState> {
    let axis = axis_of(alpha)?;
    let tau = t - t0;
    let nmax = max_order(window) + 1;
    let damp = (-2.0 * alpha * tau).exp();
    let values = match axis {
        Axis::Real(a) => {
            let x = 2.0 * a * tau;
            let i: Vec<f64> = bessel_i_log_sequence(nmax, x)?.iter().map(LogMagnitude::to_f64).collect();
            window
                .indices()
                .map(|n| {
                    let k = n.unsigned_abs() as usize;
                    let d = if x == 0.0 {
                        0.5 * (i[k.abs_diff(1)] + i[k + 1])
                    } else {
                        i[k + 1] + (k as f64 / x) * i[k]
                    };
                    Complex64::new(2.0 * a * (d - i[k]), 0.0) * damp
                })
                .collect()
        }
        Axis::Imaginary(b) => {
            let y = 2.0 * b * tau;
            let j: Vec<f64> = bessel_j_log_sequence(nmax, y)?.iter().map(LogMagnitude::to_f64).collect();
            window
                .indices()
                .map(|n| {
                    let k = n.unsigned_abs() as usize;
                    let d = if y == 0.0 {
                        let lower = if k == 0 { -j[1] } else { j[k - 1] };
                        0.5 * (lower - j[k + 1])
                    } else {
                        (k as f64 / y) * j[k] - j[k + 1]
                    };
                    i_pow(k as i64) * Complex64::new(2.0 * b, 0.0) * (Complex64::new(d, 0.0) - Complex64::new(0.0, j[k])) * damp
                })
                .collect()
        }
    };
    LatticeState::from_values(window, 1, t, values)
}

/// `J_n(x)` for signed `n` from a table of `J_0..J_nmax`.
fn signed_j(table: &[f64], n: i64) -> f64 {
    let v = table[n.unsigned_abs() as usize];
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

/// The free Schrödinger model `u_n(t) = amplitude * i^{-n} e^{-2it} J_n(1 - 2t)`.
///
/// The sequence solves `du/dt = +i Delta_1 u`; it is the imaginary-axis heat model
/// with `alpha = i`, `t0 = 1/2` times the constant `amplitude * e^{-i}`.
pub fn model_solution_schrodinger(t: f64, window: Window, amplitude: Complex64) -> Result<LatticeState> {
    let y = 1.0 - 2.0 * t;
    let j: Vec<f64> = bessel_j_log_sequence(max_order(window), y)?.iter().map(LogMagnitude::to_f64).collect();
    let phase = amplitude * Complex64::new(0.0, -2.0 * t).exp();
    Ok(LatticeState::from_fn(window, t, |n| phase * i_pow(-n) * signed_j(&j, n)))
}

/// Time derivative of [`model_solution_schrodinger`] via `J_n' = (J_{n-1} - J_{n+1}) / 2`.
pub fn model_solution_schrodinger_derivative(t: f64, window: Window, amplitude: Complex64) -> Result<LatticeState> {
    let y = 1.0 - 2.0 * t;
    let j: Vec<f64> = bessel_j_log_sequence(max_order(window) + 1, y)?.iter().map(LogMagnitude::to_f64).collect();
    let phase = amplitude * Complex64::new(0.0, -2.0 * t).exp();
    Ok(LatticeState::from_fn(window, t, |n| {
        let jn = signed_j(&j, n);
        let jp = 0.5 * (signed_j(&j, n - 1) - signed_j(&j, n + 1));
        phase * i_pow(-n) * (Complex64::new(0.0, -2.0 * jn) - 2.0 * jp)
    }))
}

/// `u_n(t) = C_r I_q(2 (t - t0))` with `n = q s + r`, `0 <= r < s`.
///
/// The sequence solves `du/dt = (A + 2) u` for the order-`2s` model operator `A`;
/// multiply by `e^{-2 (t - t0)}` for the `A`-evolution.
pub fn model_solution_higher(s: usize, coeffs: &[Complex64], t: f64, t0: f64, window: Window) -> Result<LatticeState> {
    if s == 0 || coeffs.len() != s {
        return Err(Error::InvalidArgument(format!("need s >= 1 and exactly s = {s} coefficients, got {}", coeffs.len())));
    }
    let si = s as i64;
    let qmax = max_order(window) / s + 1;
    let i: Vec<f64> = bessel_i_log_sequence(qmax, 2.0 * (t - t0))?.iter().map(LogMagnitude::to_f64).collect();
    Ok(LatticeState::from_fn(window, t, |n| {
        let q = n.div_euclid(si);
        let r = n.rem_euclid(si) as usize;
        coeffs[r] * i[q.unsigned_abs() as usize]
    }))
}

/// `max |du/dt - A u|` over indices at distance at least `margin` from the window edge.
pub fn evolution_residual(a: &BandedOperator, u: &LatticeState, dudt: &LatticeState, margin: i64) -> Result<f64> {
    let au = a.apply(u)?;
    let w = a.window();
    let mut worst: f64 = 0.0;
    for j in w.indices().filter(|&j| w.edge_distance(j) >= margin) {
        for (x, y) in dudt.block(j).iter().zip(au.block(j)) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedEnergyReport {
    pub b: f64,
    pub times: Vec<f64>,
    /// `ln f_B(t)`; `-inf` for the zero state.
    pub log_f_values: Vec<f64>,
    pub fitted_c1: f64,
    pub bound_satisfied: bool,
    /// Set when `ln f_B` is not finite for a nonzero state.
    pub diverged: bool,
}

impl WeightedEnergyReport {
    /// `f_B(t)` materialized; may overflow to infinity.
    pub fn f_values(&self) -> Vec<f64> {
        self.log_f_values.iter().map(|l| l.exp()).collect()
    }
}

/// `ln f_B(u) = ln sum_j B^|j| ||u_j||^2`.
pub fn log_weighted_energy(u: &LatticeState, b: f64) -> f64 {
    let lb = b.ln();
    log_sum_exp(u.window().indices().map(|j| {
        let n = u.block_norm(j);
        if n == 0.0 {
            f64::NEG_INFINITY
        } else {
            j.unsigned_abs() as f64 * lb + 2.0 * n.ln()
        }
    }))
}

/// Weighted energies along a trajectory with the smallest growth constant `C_1`
/// such that `f_B(t_{i+1}) <= e^{C_1 B^s (t_{i+1} - t_i)} f_B(t_i)` on every step.
pub fn weighted_energy_audit(traj: &Trajectory, b_list: &[f64]) -> Result<Vec<WeightedEnergyReport>> {
    let s = traj.operator.s() as i32;
    b_list
        .iter()
        .map(|&b| {
            if !(b > 1.0) {
                return Err(Error::InvalidArgument(format!("weight base B = {b} must exceed 1")));
            }
            let logs: Vec<f64> = traj.states.iter().map(|u| log_weighted_energy(u, b)).collect();
            let zero = logs.iter().all(|l| *l == f64::NEG_INFINITY);
            let diverged = !zero && logs.iter().any(|l| !l.is_finite());
            let bs = b.powi(s);
            let mut c1 = f64::NEG_INFINITY;
            if !zero && !diverged {
                for i in 0..logs.len().saturating_sub(1) {
                    let dt = traj.times[i + 1] - traj.times[i];
                    c1 = c1.max((logs[i + 1] - logs[i]) / (bs * dt));
                }
            }
            if zero || diverged || logs.len() < 2 {
                c1 = 0.0;
            }
            let slack = (1.0 + 1e-8f64).ln();
            let bound_satisfied = zero
                || (!diverged
                    && logs
                        .iter()
                        .zip(&traj.times)
                        .all(|(l, t)| *l <= logs[0] + c1 * bs * (t - traj.times[0]) + slack));
            Ok(WeightedEnergyReport { b, times: traj.times.clone(), log_f_values: logs, fitted_c1: c1, bound_satisfied, diverged })
        })
        .collect()
}

/// `max C_1 / min C_1` across reports; `None` when some constant is not positive.
pub fn c1_spread(reports: &[WeightedEnergyReport]) -> Option<f64> {
    let cs: Vec<f64> = reports.iter().map(|r| r.fitted_c1).collect();
    let lo = cs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo > 0.0 && hi.is_finite()).then(|| hi / lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_ops::{build_higher_order_model, build_laplacian_1d};
    use crate::special_fn::bessel_i;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_time_is_identity() {
        let w = Window::centered(5);
        let a = build_laplacian_1d(c(1.0, 0.0), w).unwrap();
        let u0 = LatticeState::delta(w, 1, 0.3).unwrap();
        let tr = propagate(&a, &u0, &[0.3]).unwrap();
        assert_eq!(tr.states, vec![u0]);
        assert!(propagate(&a, &LatticeState::delta(w, 0, 0.0).unwrap(), &[0.1]).is_err());
        assert!(propagate(&a, &LatticeState::delta(w, 0, 0.0).unwrap(), &[0.0, 0.0]).is_err());
    }

    #[test]
    fn dimension_cap() {
        let w = Window::new(0, MAX_DENSE_DIM as i64).unwrap();
        let a = build_laplacian_1d(c(1.0, 0.0), w).unwrap();
        let u0 = LatticeState::delta(w, 5, 0.0).unwrap();
        assert!(matches!(propagate(&a, &u0, &[0.0, 1.0]), Err(Error::Resource(_))));
    }

    #[test]
    fn heat_model_values() {
        let w = Window::centered(30);
        let u = model_solution_heat(c(1.0, 0.0), 0.7, 0.7, w).unwrap();
        assert_eq!(u, LatticeState::delta(w, 0, 0.7).unwrap());
        let u = model_solution_heat(c(1.0, 0.0), 1.0, 0.0, w).unwrap();
        assert!((u.at(0).re - 0.308_508_322_553_671).abs() < 1e-14);
        assert!((u.at(0).re - bessel_i(0, 2.0).unwrap() * (-2f64).exp()).abs() < 1e-15);
        assert!(w.indices().all(|n| u.at(n).re > 0.0 && u.at(n) == u.at(-n)));
        assert!(matches!(model_solution_heat(c(1.0, 1.0), 1.0, 0.0, w), Err(Error::Unsupported(_))));
    }

    #[test]
    fn heat_residuals_real_and_imaginary() {
        let w = Window::centered(120);
        for alpha in [c(1.0, 0.0), c(0.5, 0.0), c(0.0, 1.0), c(0.0, -0.7)] {
            let a = build_laplacian_1d(alpha, w).unwrap();
            for t in [-0.4, 0.0, 0.5, 1.0] {
                let u = model_solution_heat(alpha, t, 0.0, w).unwrap();
                let du = model_solution_heat_derivative(alpha, t, 0.0, w).unwrap();
                assert!(evolution_residual(&a, &u, &du, 1).unwrap() < 1e-12, "alpha={alpha} t={t}");
            }
        }
    }

    #[test]
    fn schrodinger_model_facts() {
        let w = Window::centered(40);
        let amp = c(0.3, -1.1);
        let mid = model_solution_schrodinger(0.5, w, amp).unwrap();
        let want = amp * Complex64::new(0.0, -1.0).exp();
        assert!((mid.at(0) - want).norm() < 1e-15);
        assert!(w.indices().filter(|&n| n != 0).all(|n| mid.at(n).norm() == 0.0));
        let u0 = model_solution_schrodinger(0.0, w, c(1.0, 0.0)).unwrap();
        for n in 0..10i64 {
            let jn = crate::special_fn::bessel_j(n as usize, 1.0).unwrap();
            assert!((u0.at(n).norm() - jn.abs()).abs() < 1e-15);
            assert!((u0.at(-n).norm() - jn.abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn schrodinger_model_solves_positive_imaginary_laplacian() {
        let w = Window::centered(60);
        let plus = build_laplacian_1d(c(0.0, 1.0), w).unwrap();
        let minus = build_laplacian_1d(c(0.0, -1.0), w).unwrap();
        for t in [0.0, 0.25, 0.75] {
            let u = model_solution_schrodinger(t, w, c(1.0, 0.0)).unwrap();
            let du = model_solution_schrodinger_derivative(t, w, c(1.0, 0.0)).unwrap();
            assert!(evolution_residual(&plus, &u, &du, 1).unwrap() < 1e-13);
            let wrong = evolution_residual(&minus, &u, &du, 1).unwrap();
            let two_du = 2.0 * du.max_abs();
            assert!((wrong - two_du).abs() < 1e-12, "residual against -i Delta is 2|du/dt|");
            let heat = model_solution_heat(c(0.0, 1.0), t, 0.5, w).unwrap();
            let shifted = heat.scaled(Complex64::new(0.0, -1.0).exp());
            for n in w.indices() {
                assert!((shifted.at(n) - u.at(n)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn higher_order_model() {
        let w = Window::centered(40);
        let coeffs = [c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.0)];
        let at_t0 = model_solution_higher(3, &coeffs, 0.2, 0.2, w).unwrap();
        for n in w.indices() {
            let want = if (0..3).contains(&n) { coeffs[n as usize] } else { c(0.0, 0.0) };
            assert_eq!(at_t0.at(n), want);
        }
        let heat = model_solution_heat(c(1.0, 0.0), 0.8, 0.0, w).unwrap();
        let plain = model_solution_higher(1, &[c(1.0, 0.0)], 0.8, 0.0, w).unwrap().scaled(c((-1.6f64).exp(), 0.0));
        for n in w.indices() {
            assert!((heat.at(n) - plain.at(n)).norm() < 1e-15);
        }
        assert!(model_solution_higher(2, &coeffs, 0.0, 0.0, w).is_err());
    }

    #[test]
    fn higher_order_model_against_propagator() {
        let w = Window::centered(60);
        for s in [1usize, 2] {
            let a = build_higher_order_model(s, w).unwrap();
            let coeffs: Vec<Complex64> = (0..s).map(|r| c(1.0 + r as f64, -(r as f64))).collect();
            let u0 = model_solution_higher(s, &coeffs, 0.0, 0.0, w).unwrap();
            let tr = propagate(&a, &u0, &[0.0, 0.5, 1.0]).unwrap();
            for (st, &t) in tr.states.iter().zip(&tr.times) {
                let want = model_solution_higher(s, &coeffs, t, 0.0, w).unwrap().scaled(c((-2.0 * t).exp(), 0.0));
                for n in -30..=30 {
                    assert!((st.at(n) - want.at(n)).norm() < 1e-12, "s={s} t={t} n={n}");
                }
            }
        }
    }

    #[test]
    fn group_law_and_unitarity() {
        let w = Window::centered(40);
        let a = build_laplacian_1d(c(0.0, -1.0), w).unwrap();
        let u0 = LatticeState::from_fn(w, 0.0, |j| c((-(j * j) as f64 / 8.0).exp(), 0.0));
        let stepped = propagate(&a, &u0, &[0.0, 0.3, 0.7]).unwrap();
        let direct = propagate(&a, &u0, &[0.0, 0.7]).unwrap();
        let diff = stepped.last().combine(c(1.0, 0.0), direct.last(), c(-1.0, 0.0)).unwrap();
        assert!(diff.norm() <= 1e-12 * u0.norm());
        assert!((stepped.last().norm() - u0.norm()).abs() <= 1e-12 * u0.norm());
    }

    #[test]
    fn eigenvector_evolves_by_exponential() {
        let w = Window::centered(10);
        let a = build_laplacian_1d(c(1.0, 0.0), w).unwrap();
        let eig = a.to_dense().map(|z| z.re).symmetric_eigen();
        let mu = eig.eigenvalues[3];
        let v: Vec<Complex64> = eig.eigenvectors.column(3).iter().map(|&x| c(x, 0.0)).collect();
        let u0 = LatticeState::from_values(w, 1, 0.0, v).unwrap();
        let tr = propagate(&a, &u0, &[0.0, 0.9]).unwrap();
        let want = u0.scaled(c((0.9 * mu).exp(), 0.0));
        let diff = tr.last().combine(c(1.0, 0.0), &want, c(-1.0, 0.0)).unwrap();
        assert!(diff.max_abs() < 1e-10);
    }

    #[test]
    fn energy_audit_zero_and_heat() {
        let w = Window::centered(60);
        let a = build_laplacian_1d(c(1.0, 0.0), w).unwrap();
        let times = time_grid(0.0, 1.0, 11);
        let zero = propagate(&a, &LatticeState::zeros(w, 1, 0.0), &times).unwrap();
        let r = weighted_energy_audit(&zero, &[2.0]).unwrap();
        assert!(r[0].bound_satisfied && !r[0].diverged);
        assert!(r[0].f_values().iter().all(|&f| f == 0.0));

        let heat = propagate(&a, &LatticeState::delta(w, 0, 0.0).unwrap(), &times).unwrap();
        let reports = weighted_energy_audit(&heat, &[4.0]).unwrap();
        assert!(reports[0].bound_satisfied);
        assert!(weighted_energy_audit(&heat, &[1.0]).is_err());
    }

    #[test]
    fn energy_bounds_pointwise_decay() {
        // ||u_j||^2 <= f_B / B^|j| for every B; optimizing over B tracks the true decay.
        let w = Window::centered(80);
        let u = model_solution_heat(c(1.0, 0.0), 1.0, 0.0, w).unwrap();
        for j in [5i64, 10, 20, 30] {
            let best = (2..200)
                .map(|b| 0.5 * (log_weighted_energy(&u, b as f64) - j as f64 * (b as f64).ln()))
                .fold(f64::INFINITY, f64::min);
            let actual = u.at(j).norm().ln();
            assert!(actual <= best + 1e-12);
            let k = j as f64 + 1.0;
            assert!(best - actual <= k, "slack e^k at j={j}: {}", best - actual);
        }
    }

    #[test]
    fn trajectory_csv() {
        let w = Window::centered(2);
        let a = build_laplacian_1d(c(1.0, 0.0), w).unwrap();
        let tr = propagate(&a, &LatticeState::delta(w, 0, 0.0).unwrap(), &[0.0, 0.5]).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,n,block_index,re,im,log_abs\n"));
        assert_eq!(text.lines().count(), 11);
    }
}
