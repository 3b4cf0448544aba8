//! Two-time decay audit: the heat kernel sits exactly on the critical
//! envelope, faster decay is impossible and slower decay is allowed.
use discrete_evolution::evolution::model_solution_heat;
use discrete_evolution::uniqueness_probe::decay_audit_in;
use discrete_evolution::{LatticeState, Window};
use num_complex::Complex64;

fn main() -> discrete_evolution::Result<()> {
    let w = Window::centered(80);
    let t = 1.0;
    let one = Complex64::new(1.0, 0.0);
    let u0 = model_solution_heat(one, 0.0, t / 2.0, w)?;
    let ut = model_solution_heat(one, t, t / 2.0, w)?;

    for eps in [0.0, 0.1, 0.5] {
        let rep = decay_audit_in(&u0, &ut, t, 1.0, eps, 1, (10, 60))?;
        let worst = rep.critical_margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!("eps = {eps}: verdict {:?}, largest level-0 margin {worst:.3}", rep.verdict);
    }

    // an exponential tail decays far slower than the critical envelope
    let fat = LatticeState::from_fn(w, t, |j| Complex64::new((-(j.abs() as f64)).exp(), 0.0));
    let rep = decay_audit_in(&u0, &fat, t, 1.0, 0.1, 1, (10, 60))?;
    println!("exponential tail: verdict {:?}", rep.verdict);
    Ok(())
}
