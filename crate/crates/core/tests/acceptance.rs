//! Acceptance suite: one PASS/FAIL line per criterion, then a summary.
//! Criteria are independent, so a failure in one does not stop the rest.

use rotset_core::acceptance::{criterion_count, format_line, run};

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for id in 1..=criterion_count() {
        let r = run(id, false);
        println!("{}", format_line(&r));
        if !r.passed {
            failed.push(id);
        }
    }
    println!("acceptance: {} of {} criteria passed", criterion_count() - failed.len(), criterion_count());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
