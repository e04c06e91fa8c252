//! One line per acceptance criterion, then a single assertion over all.

use topexp::verify::{run_criterion, DEFAULT_SEED};

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for c in 1..=10 {
        let r = run_criterion(c, DEFAULT_SEED);
        println!("criterion {:>2} [{}] {} ({:.1}s): {}", c, if r.passed { "PASS" } else { "FAIL" }, r.name, r.seconds, r.detail);
        if !r.passed {
            failed.push(c);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
