use discrete_evolution::acceptance::{run_suite, summary_line, CRITERIA};

const SEED: u64 = 7;

#[test]
fn acceptance_suite() {
    let (report, timings) = run_suite(SEED, 1.0, |c| println!("{}", summary_line(c)));
    assert_eq!(report.criteria.len(), CRITERIA.len());
    for t in &timings {
        if !t.within_budget {
            println!("criterion {} took {:.1}s (budget {:?}s)", t.id, t.seconds, t.budget_seconds);
        }
    }
    let failed: Vec<String> = report.criteria.iter().filter(|c| !c.passed).map(summary_line).collect();
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.join("\n"));
}
