//! Run the acceptance suite; pass a seed as the first argument.
use discrete_evolution::acceptance::{run_suite, summary_line};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let (report, timings) = run_suite(seed, 1.0, |c| println!("{}", summary_line(c)));
    let total: f64 = timings.iter().map(|t| t.seconds).sum();
    println!("seed {seed}: all passed {} in {total:.1}s", report.all_passed);
}
