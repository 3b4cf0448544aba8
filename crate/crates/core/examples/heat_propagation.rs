//! Propagate a point mass under the discrete Laplacian and compare with the
//! Bessel closed form `e^{-2t} I_n(2t)`.
use discrete_evolution::evolution::{model_solution_heat, propagate, time_grid};
use discrete_evolution::lattice_ops::build_laplacian_1d;
use discrete_evolution::{LatticeState, Window};
use num_complex::Complex64;

fn main() -> discrete_evolution::Result<()> {
    let w = Window::centered(80);
    let lap = build_laplacian_1d(Complex64::new(1.0, 0.0), w)?;
    let traj = propagate(&lap, &LatticeState::delta(w, 0, 0.0)?, &time_grid(0.0, 2.0, 5))?;

    for (t, u) in traj.times.iter().zip(&traj.states) {
        let exact = model_solution_heat(Complex64::new(1.0, 0.0), *t, 0.0, w)?;
        let err = (-40..=40).map(|j| (u.at(j) - exact.at(j)).norm()).fold(0.0, f64::max);
        println!("t = {t:.1}  u_0 = {:.12}  u_10 = {:.3e}  max err = {err:.2e}", u.at(0).re, u.at(10).re);
    }

    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    let text = String::from_utf8(csv).unwrap();
    println!("\ntrajectory.csv ({} rows), first lines:", text.lines().count() - 1);
    text.lines().take(4).for_each(|l| println!("  {l}"));
    Ok(())
}
