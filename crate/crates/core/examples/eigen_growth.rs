//! Generalized eigenvectors of the adjoint grown outward from seed blocks,
//! and the geometric growth bound they obey.
use discrete_evolution::eigen_engine::{extend_eigenvector, growth_audit, verify_eigen};
use discrete_evolution::sampling::{random_scalar_operator, random_seeds, trial_rng, OperatorLimits};
use discrete_evolution::Window;
use num_complex::Complex64;

fn main() -> discrete_evolution::Result<()> {
    let w = Window::centered(100);
    let mut rng = trial_rng(42, 0);
    for s in 1..=3 {
        let a = random_scalar_operator(&mut rng, s, w, &OperatorLimits::default());
        let consts = a.audit_constants()?;
        let seeds = random_seeds(&mut rng, s, 1);
        println!("s = {s}: a = {:.3}, delta = {:.3}", consts.a, consts.delta);
        for lambda in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(-3.0, 0.5)] {
            let fam = extend_eigenvector(&a, &seeds, lambda)?;
            let check = verify_eigen(&a, &fam)?;
            let audit = growth_audit(&fam, &consts)?;
            println!(
                "  lambda {lambda:>8}: rel residual {:.1e}, ln|e_100| = {:8.2}, growth/step {:.3}, b = {:.2}, holds {}",
                check.max_relative,
                fam.log_norm(100),
                audit.growth_rate,
                audit.fitted_b,
                audit.bound_holds
            );
        }
    }
    Ok(())
}
