//! Kernel vectors of banded operators and lattice Schrödinger bound states:
//! how fast can a nonzero stationary solution decay?
use discrete_evolution::sampling::{random_scalar_operator, random_seeds, trial_rng, OperatorLimits};
use discrete_evolution::stationary::{check_stationary_decay, kernel_vector, separable_bound_state, shell_decay_audit};
use discrete_evolution::Window;

fn main() -> discrete_evolution::Result<()> {
    let w = Window::centered(40);
    for trial in 0..4 {
        let mut rng = trial_rng(8, trial);
        let a = random_scalar_operator(&mut rng, 1, w, &OperatorLimits::default());
        let u = kernel_vector(&a, &random_seeds(&mut rng, 1, 1))?;
        let v = check_stationary_decay(&u, &a)?;
        println!("kernel vector {trial}: rate {:+.3}, decay threshold -{:.3}", v.rate_estimate, v.threshold);
    }

    for d in 1..=3 {
        let (u, pot) = separable_bound_state(d, if d == 3 { 12 } else { 30 });
        let audit = shell_decay_audit(&u, &pot)?;
        println!(
            "bound state d = {d}: rate {:+.4} vs threshold {:+.4}, inequality violations {}",
            audit.rate_estimate, audit.threshold, audit.violations
        );
    }
    Ok(())
}
