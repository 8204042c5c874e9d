//! Runs all twelve acceptance criteria at their stated tolerances and prints one PASS/FAIL line
//! per criterion.
//!
//! Criteria 7, 8 and 10 fail as stated: the displayed Siegel product, the displayed functional
//! equation, the displayed Mellin kernel and the residue-1 normalisation of Gamma_C do not hold.
//! Their corrected forms run alongside as supporting checks and must pass. This test pins that
//! outcome, so a regression in either direction is caught.

use picard::suites::{run_suite, CriterionReport, Role, SuiteConfig, SUITES};

const EXPECTED_FAILURES: [u32; 3] = [7, 8, 10];

fn print_report(r: &CriterionReport) {
    let budget = r.budget_ms.map(|b| format!(" (budget {:.0} s)", b / 1e3)).unwrap_or_default();
    println!("{} criterion {:>2}: {} [{:.1} ms{}]", if r.pass { "PASS" } else { "FAIL" }, r.id, r.title, r.elapsed_ms, budget);
    for c in &r.checks {
        let tag = match (c.role, c.pass) {
            (Role::Criterion, true) => "ok  ",
            (Role::Criterion, false) => "FAIL",
            (Role::Supporting, true) => "sup ",
            (Role::Supporting, false) => "SUP!",
        };
        match (c.value, c.tolerance) {
            (Some(v), Some(t)) => println!("    {tag} {}: {v:.3e} (tolerance {t:.0e})", c.name),
            _ => println!("    {tag} {}", c.name),
        }
    }
}

fn main() {
    let cfg = SuiteConfig::default();
    let mut mismatches = Vec::new();
    let mut passed = 0;
    for suite in SUITES.iter() {
        let r = run_suite(suite, &cfg);
        print_report(&r);
        passed += r.pass as usize;
        let expected = !EXPECTED_FAILURES.contains(&r.id);
        if r.pass != expected {
            mismatches.push(format!("criterion {} expected {} got {}", r.id, expected, r.pass));
        }
        if !r.supporting_ok() {
            mismatches.push(format!("criterion {}: a supporting check failed", r.id));
        }
        for c in r.checks.iter().filter(|c| c.name == "evaluation completed") {
            mismatches.push(format!("criterion {}: {}", r.id, c.detail));
        }
    }
    let failed = SUITES.len() - passed;
    println!("acceptance: {passed} PASS, {failed} FAIL (expected FAIL: {EXPECTED_FAILURES:?})");
    if !mismatches.is_empty() {
        eprintln!("unexpected acceptance outcome: {mismatches:#?}");
        std::process::exit(1);
    }
}
