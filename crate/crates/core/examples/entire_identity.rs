//! The pairing `phi(t, lambda)` of a solution with an eigenvector family of
//! the adjoint evolves as `e^{lambda t} phi(0, lambda)`.
use discrete_evolution::acceptance::identity_grid;
use discrete_evolution::eigen_engine::unit_seeds;
use discrete_evolution::evolution::{propagate, time_grid};
use discrete_evolution::lattice_ops::build_laplacian_1d;
use discrete_evolution::uniqueness_probe::{check_entire_identity, write_phi_csv};
use discrete_evolution::{LatticeState, Window};
use num_complex::Complex64;

fn main() -> discrete_evolution::Result<()> {
    let w = Window::centered(200);
    let a = build_laplacian_1d(Complex64::new(1.0, 0.0), w)?;
    let traj = propagate(&a, &LatticeState::delta(w, 0, 0.0)?, &time_grid(0.0, 1.0, 5))?;
    let seeds = unit_seeds(1, 1, 0, &[Complex64::new(1.0, 0.0)]);
    let rep = check_entire_identity(&traj, &a, &seeds, &identity_grid())?;
    println!("max |ln phi(t) - ln phi(0) - lambda t| = {:.2e}", rep.max_defect);
    println!("worst at lambda = {}, t = {}", rep.worst_lambda, rep.worst_t);
    println!("boundary spill {}", rep.boundary_spill);

    let mut out = Vec::new();
    write_phi_csv(&rep.samples[..6], &mut out)?;
    print!("{}", String::from_utf8(out).unwrap());
    Ok(())
}
