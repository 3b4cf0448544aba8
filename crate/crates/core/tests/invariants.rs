use discrete_evolution::eigen_engine::{extend_eigenvector, unit_seeds, verify_eigen};
use discrete_evolution::evolution::propagate;
use discrete_evolution::favard::{build_all_families, random_commuting_spec, reconstruct_coordinate};
use discrete_evolution::lattice_ops::build_laplacian_1d;
use discrete_evolution::sampling::{random_scalar_operator, random_seeds, random_state, trial_rng, OperatorLimits};
use discrete_evolution::special_fn::{bessel_i_sequence, bessel_j_sequence};
use discrete_evolution::stationary::{check_stationary_decay, kernel_decay_threshold, kernel_vector};
use discrete_evolution::uniqueness_probe::{phi, probe_family, shell_of};
use discrete_evolution::{LatticeState, Window};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn diff(a: &LatticeState, b: &LatticeState) -> f64 {
    a.combine(c(1.0, 0.0), b, c(-1.0, 0.0)).unwrap().norm()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn adjoint_is_an_involution_and_matches_inner_product(seed in any::<u64>(), s in 1usize..4) {
        let w = Window::centered(12);
        let mut rng = trial_rng(seed, 0);
        let a = random_scalar_operator(&mut rng, s, w, &OperatorLimits::default());
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let x = random_state(&mut rng, w, 1);
        let y = random_state(&mut rng, w, 1);
        let lhs = a.apply(&x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&a.adjoint().apply(&y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn bessel_generating_sums(x in 0.0f64..40.0) {
        let i = bessel_i_sequence(200, x).unwrap();
        let sum_i = i[0] + 2.0 * i[1..].iter().sum::<f64>();
        prop_assert!((sum_i / x.exp() - 1.0).abs() < 1e-12);
        let j = bessel_j_sequence(200, x).unwrap();
        let sum_j = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
        prop_assert!((sum_j - 1.0).abs() < 1e-12);
        let sq = j[0] * j[0] + 2.0 * j[1..].iter().map(|v| v * v).sum::<f64>();
        prop_assert!((sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn propagation_is_a_semigroup(seed in any::<u64>(), t1 in 0.05f64..0.6, t2 in 0.05f64..0.6) {
        let w = Window::centered(10);
        let mut rng = trial_rng(seed, 1);
        let a = random_scalar_operator(&mut rng, 2, w, &OperatorLimits::default());
        let u0 = random_state(&mut rng, w, 1);
        let direct = propagate(&a, &u0, &[0.0, t1 + t2]).unwrap();
        let first = propagate(&a, &u0, &[0.0, t1]).unwrap();
        let second = propagate(&a, first.last(), &[t1, t1 + t2]).unwrap();
        prop_assert!(diff(direct.last(), second.last()) <= 1e-10 * (1.0 + direct.last().norm()));
    }

    #[test]
    fn eigenvector_extension_solves_the_adjoint_equation(seed in any::<u64>(), s in 1usize..4, re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let w = Window::centered(15);
        let mut rng = trial_rng(seed, 2);
        let a = random_scalar_operator(&mut rng, s, w, &OperatorLimits::default());
        let seeds = random_seeds(&mut rng, s, 1);
        let fam = extend_eigenvector(&a, &seeds, c(re, im)).unwrap();
        prop_assert!(verify_eigen(&a, &fam).unwrap().max_relative < 1e-10);
    }

    #[test]
    fn pairing_is_linear(seed in any::<u64>(), re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let w = Window::centered(10);
        let mut rng = trial_rng(seed, 3);
        let a = random_scalar_operator(&mut rng, 1, w, &OperatorLimits::default());
        let fam = probe_family(&a, &unit_seeds(1, 1, 0, &[c(1.0, 0.0)]), c(re, im)).unwrap();
        let x = random_state(&mut rng, w, 1);
        let y = random_state(&mut rng, w, 1);
        let k = c(0.3, -1.7);
        let lhs = phi(&x.combine(c(1.0, 0.0), &y, k).unwrap(), &fam).unwrap().value.to_complex();
        let rhs = phi(&x, &fam).unwrap().value.to_complex() + k * phi(&y, &fam).unwrap().value.to_complex();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn shells_are_symmetric(j in 0i64..10_000, s in 1usize..6) {
        let s64 = s as i64;
        prop_assert_eq!(shell_of(j, s), (j / s64) as u64);
        prop_assert_eq!(shell_of(-j, s), (j + s64 - 1) as u64 / s as u64);
    }
}

#[test]
fn pairing_follows_the_exponential_in_time() {
    let w = Window::centered(120);
    let a = build_laplacian_1d(c(1.0, 0.0), w).unwrap();
    let traj = propagate(&a, &LatticeState::delta(w, 0, 0.0).unwrap(), &[0.0, 0.5, 1.0]).unwrap();
    let seeds = unit_seeds(1, 1, 0, &[c(1.0, 0.0)]);
    for lambda in [c(0.4, -0.9), c(-1.2, 0.3)] {
        let fam = probe_family(&a, &seeds, lambda).unwrap();
        let p0 = phi(&traj.states[0], &fam).unwrap().value.to_complex();
        for (t, u) in traj.times.iter().zip(&traj.states) {
            let pt = phi(u, &fam).unwrap().value.to_complex();
            let want = p0 * (lambda * *t).exp();
            assert!((pt - want).norm() < 1e-9 * want.norm(), "lambda {lambda} t {t}: {pt} vs {want}");
        }
    }
}

#[test]
fn block_reconstruction_for_commuting_entries() {
    let w = Window::centered(14);
    let mut rng = trial_rng(11, 0);
    let spec = random_commuting_spec(&mut rng, 1, 2, w, 0.5, 2.0);
    let a = spec.to_operator(1, w).unwrap();
    let fams = build_all_families(&a).unwrap();
    for x in [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]] {
        for n in -6..=6 {
            let out = reconstruct_coordinate(&a, n, &fams, &x).unwrap();
            let want = LatticeState::embed(w, n, &x, 0.0).unwrap();
            assert!(diff(&out, &want) < 1e-8, "n {n}: {}", diff(&out, &want));
        }
    }
}

#[test]
fn kernel_vectors_grow_faster_than_the_threshold() {
    let w = Window::centered(60);
    for trial in 0..5 {
        let mut rng = trial_rng(5, trial);
        let a = random_scalar_operator(&mut rng, 1, w, &OperatorLimits::default());
        let u = kernel_vector(&a, &random_seeds(&mut rng, 1, 1)).unwrap();
        let verdict = check_stationary_decay(&u, &a).unwrap();
        let consts = a.audit_constants().unwrap();
        assert_eq!(verdict.threshold, kernel_decay_threshold(&consts, 1));
        assert!(!verdict.degenerate);
        assert!(!verdict.forces_zero || verdict.rate_estimate >= -verdict.threshold - 1e-12);
    }
}
