//! Growth of the pairing along rays `lambda = r e^{i theta}`: a slope near
//! zero means zero exponential type in that direction.
use discrete_evolution::eigen_engine::unit_seeds;
use discrete_evolution::evolution::model_solution_heat;
use discrete_evolution::lattice_ops::build_laplacian_1d;
use discrete_evolution::uniqueness_probe::{indicator_estimate, phi_on_ray};
use discrete_evolution::Window;
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> discrete_evolution::Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let w = Window::centered(250);
    let a = build_laplacian_1d(one, w)?;
    let seeds = unit_seeds(1, 1, 0, &[one]);
    let radii: Vec<f64> = (0..12).map(|i| 8.0 + 1.5 * i as f64).collect();

    for t in [0.0, 0.5] {
        let u = model_solution_heat(one, t, 0.0, w)?;
        println!("t = {t}");
        for k in 0..8 {
            let theta = k as f64 * PI / 4.0;
            let samples = phi_on_ray(&u, &a, &seeds, theta, &radii)?;
            let logs: Vec<f64> = samples.iter().map(|p| p.value.log_abs).collect();
            let est = indicator_estimate(theta, &radii, &logs)?;
            println!("  theta = {:5.3}  slope {:+.4}  near zero {}", theta, est.slope, est.near_zero);
        }
    }
    Ok(())
}
