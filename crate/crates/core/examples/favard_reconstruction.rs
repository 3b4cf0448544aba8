//! Polynomial families `P_j(lambda)` with `e_j = sum_d C_{j,d} lambda^d`
//! reproduce every coordinate vector from the operator alone.
use discrete_evolution::evolution::model_solution_heat;
use discrete_evolution::favard::{build_all_families, completeness_probe, reconstruct_coordinate};
use discrete_evolution::sampling::{random_scalar_operator, trial_rng, OperatorLimits};
use discrete_evolution::{LatticeState, Window};
use num_complex::Complex64;

fn main() -> discrete_evolution::Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let w = Window::centered(20);
    let a = random_scalar_operator(&mut trial_rng(3, 0), 2, w, &OperatorLimits::default());
    let fams = build_all_families(&a)?;
    for f in &fams {
        println!("residue {}: degree of P_7 = {:?}, P_7(0.5) = {:.4}", f.residue(), f.degree(7), f.evaluate(7, Complex64::new(0.5, 0.0))[(0, 0)]);
    }

    for n in [-12, -3, 0, 5, 14] {
        let got = reconstruct_coordinate(&a, n, &fams, &[one])?;
        let err = got.combine(one, &LatticeState::delta(w, n, 0.0)?, -one)?.norm();
        println!("delta_{n:<3} rebuilt with error {err:.2e}");
    }

    let u = model_solution_heat(one, 0.5, 0.0, w)?;
    let rep = completeness_probe(&u, &a, &[one])?;
    println!(
        "moments reproduce <u_k, x> on {:?} with max defect {:.2e} (tail warning: {})",
        rep.admissible, rep.max_defect, rep.truncation_warning
    );
    Ok(())
}
