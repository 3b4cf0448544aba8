//! Values checked against independent closed forms.

use discrete_evolution::evolution::{model_solution_heat, propagate};
use discrete_evolution::lattice_ops::build_laplacian_1d;
use discrete_evolution::special_fn::{bessel_i, bessel_j};
use discrete_evolution::stationary::{schrodinger_threshold, separable_bound_state, shell_decay_audit};
use discrete_evolution::{LatticeState, Window};
use num_complex::Complex64;

fn series(n: u32, x: f64, sign: f64) -> f64 {
    let mut term = (x / 2.0).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200u32 {
        term *= sign * (x / 2.0).powi(2) / (f64::from(k) * f64::from(k + n));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

#[test]
fn bessel_against_power_series() {
    for n in [0u32, 1, 2, 5, 11] {
        for x in [0.1, 0.5, 1.0, 2.5, 4.0] {
            let i = bessel_i(n as usize, x).unwrap();
            let j = bessel_j(n as usize, x).unwrap();
            assert!((i / series(n, x, 1.0) - 1.0).abs() < 1e-13, "I_{n}({x})");
            assert!((j - series(n, x, -1.0)).abs() < 1e-14, "J_{n}({x})");
        }
    }
    // tabulated values
    assert!((bessel_j(0, 2.404825557695773).unwrap()).abs() < 1e-14);
    assert!((bessel_i(0, 1.0).unwrap() - 1.2660658777520082).abs() < 1e-15);
    assert!((bessel_i(1, 1.0).unwrap() - 0.5651591039924851).abs() < 1e-15);
}

#[test]
fn heat_kernel_matches_propagator() {
    let w = Window::centered(60);
    let a = build_laplacian_1d(Complex64::new(1.0, 0.0), w).unwrap();
    let traj = propagate(&a, &LatticeState::delta(w, 0, 0.0).unwrap(), &[0.0, 1.5]).unwrap();
    let model = model_solution_heat(Complex64::new(1.0, 0.0), 1.5, 0.0, w).unwrap();
    for j in -30i64..=30 {
        let want = (-3.0f64).exp() * bessel_i(j.unsigned_abs() as usize, 3.0).unwrap();
        assert!((traj.last().at(j).re - want).abs() < 1e-14, "j {j}: {} vs {want}", traj.last().at(j));
        assert!((model.at(j).re - want).abs() < 1e-15, "j {j}: {} vs {want}", model.at(j));
    }
}

#[test]
fn one_dimensional_bound_state_decays_at_log_of_two_minus_root_three() {
    let (u, v) = separable_bound_state(1, 40);
    let audit = shell_decay_audit(&u, &v).unwrap();
    let rate = (2.0 - 3f64.sqrt()).ln();
    assert!((audit.rate_estimate - rate).abs() < 1e-6, "{}", audit.rate_estimate);
    assert_eq!(audit.violations, 0);
    assert!(audit.rate_estimate > schrodinger_threshold(1, 2.0));
    assert!(!audit.forces_zero);
}
