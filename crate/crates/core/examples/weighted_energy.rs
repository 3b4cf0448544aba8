//! `f_B(t) = sum_j B^{|j|} |u_j(t)|^2` and the constant `C1` fitted to
//! `f_B(t) <= f_B(0) e^{C1 B t}` for a few weights.
use discrete_evolution::evolution::{c1_spread, propagate, time_grid, weighted_energy_audit};
use discrete_evolution::lattice_ops::build_laplacian_1d;
use discrete_evolution::{LatticeState, Window};
use num_complex::Complex64;

fn main() -> discrete_evolution::Result<()> {
    let w = Window::centered(200);
    let a = build_laplacian_1d(Complex64::new(1.0, 0.0), w)?;
    let traj = propagate(&a, &LatticeState::delta(w, 0, 0.0)?, &time_grid(0.0, 1.0, 11))?;
    let reports = weighted_energy_audit(&traj, &[2.0, 4.0, 8.0])?;
    for r in &reports {
        let f: Vec<String> = r.log_f_values.iter().step_by(2).map(|v| format!("{v:.3}")).collect();
        println!("B = {}: ln f = [{}], C1 = {:.4}, bound ok {}", r.b, f.join(", "), r.fitted_c1, r.bound_satisfied);
    }
    println!("C1 spread: {:?}", c1_spread(&reports));
    Ok(())
}
