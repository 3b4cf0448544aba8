//! Closed-form model solutions checked against the evolution equation they
//! are supposed to solve, by differentiating analytically.
use discrete_evolution::evolution::{
    evolution_residual, model_solution_heat, model_solution_heat_derivative, model_solution_higher,
    model_solution_schrodinger, model_solution_schrodinger_derivative,
};
use discrete_evolution::lattice_ops::{build_higher_order_model, build_laplacian_1d};
use discrete_evolution::Window;
use num_complex::Complex64;

fn main() -> discrete_evolution::Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let w = Window::centered(60);

    let heat = build_laplacian_1d(one, w)?;
    let u = model_solution_heat(one, 0.3, 0.0, w)?;
    let du = model_solution_heat_derivative(one, 0.3, 0.0, w)?;
    println!("heat         residual {:.2e}", evolution_residual(&heat, &u, &du, 10)?);

    let u = model_solution_schrodinger(0.3, w, one)?;
    let du = model_solution_schrodinger_derivative(0.3, w, one)?;
    for (label, alpha) in [("+i Laplacian", i), ("-i Laplacian", -i)] {
        let op = build_laplacian_1d(alpha, w)?;
        println!("schrodinger  residual against {label}: {:.2e}", evolution_residual(&op, &u, &du, 10)?);
    }

    // higher-order model: finite differences in t against (A + 2) u
    let s = 3;
    let a = build_higher_order_model(s, w)?;
    let coeffs = vec![one, Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.25)];
    let (t, h) = (0.4, 1e-4);
    let u = model_solution_higher(s, &coeffs, t, 0.0, w)?;
    let up = model_solution_higher(s, &coeffs, t + h, 0.0, w)?;
    let um = model_solution_higher(s, &coeffs, t - h, 0.0, w)?;
    let du = up.combine(Complex64::new(0.5 / h, 0.0), &um, Complex64::new(-0.5 / h, 0.0))?;
    let au = a.apply(&u)?.combine(one, &u, Complex64::new(2.0, 0.0))?;
    let worst = a.interior_rows().filter(|j| j.abs() < 40).map(|j| (au.at(j) - du.at(j)).norm()).fold(0.0, f64::max);
    println!("higher s={s}   residual (central difference, h = {h}) {worst:.2e}");
    Ok(())
}
