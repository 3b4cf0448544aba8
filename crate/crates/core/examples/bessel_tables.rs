//! Integer-order Bessel functions from the Miller recurrence, including
//! arguments where the plain values overflow and only logs survive.
use discrete_evolution::special_fn::{bessel_i, bessel_i_log_sequence, bessel_j_sequence};

fn main() -> discrete_evolution::Result<()> {
    println!("{:>4} {:>22} {:>22}", "n", "I_n(2)", "J_n(2)");
    let j = bessel_j_sequence(10, 2.0)?;
    for (n, jn) in j.iter().enumerate() {
        println!("{n:>4} {:>22.15e} {jn:>22.15e}", bessel_i(n, 2.0)?);
    }

    // I_n(650) overflows f64 for small n; the log-domain sequence does not.
    let logs = bessel_i_log_sequence(2000, 650.0)?;
    for n in [0, 100, 500, 1000, 2000] {
        println!("ln I_{n}(650) = {:.6}", logs[n].log_abs);
    }

    let j = bessel_j_sequence(40, 2.0)?;
    let sum: f64 = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    println!("J_0 + 2 sum J_2k = {sum:.16}");
    Ok(())
}
