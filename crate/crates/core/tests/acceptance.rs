//! All nine acceptance criteria at their stated sizes and tolerances, plus the
//! corrupted-sign negative control.

use iwasawa_descent::selftest::{run_all, suite, SelftestConfig};

#[test]
fn acceptance() {
    let cfg = SelftestConfig { parallel: true, ..Default::default() };
    let reports = run_all(&cfg);
    for r in &reports {
        println!("{}", r.line());
        for note in &r.notes {
            println!("    {note}");
        }
    }
    let control = suite(&SelftestConfig { corrupt_sign: true, trials: Some(100), ..cfg.clone() }, 1).unwrap();
    println!(
        "{} negative control (corrupted sign convention): route suite {} with {}/{} failures",
        if control.passed() { "FAIL" } else { "PASS" },
        if control.passed() { "passed" } else { "failed" },
        control.failures,
        control.trials
    );
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    assert!(failed.is_empty(), "criteria failing: {failed:?}");
    assert!(!control.passed(), "the corrupted sign convention went unnoticed");
}
