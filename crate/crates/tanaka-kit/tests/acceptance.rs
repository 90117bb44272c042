//! One PASS/FAIL line per acceptance criterion, with the pinned runtime
//! limits; exits nonzero if any criterion or fixture expectation fails.

use std::process::ExitCode;

use tanaka_kit::verify::{self, Fixtures};

fn main() -> ExitCode {
    let fx = Fixtures::new(verify::default_fixtures());
    let mut failed = Vec::new();
    println!("\nrunning {} acceptance criteria", verify::CRITERIA);
    for id in 1..=verify::CRITERIA {
        let c = verify::run(id, &fx);
        println!("{}", c.line(true));
        for k in c.checks.iter().filter(|k| !k.passed) {
            println!("    failed: {} {}", k.name, k.detail);
        }
        if !c.passed {
            failed.push(id.to_string());
        }
    }
    let checks = verify::fixture_expectations(&fx);
    let bad: Vec<_> = checks.iter().filter(|k| !k.passed).collect();
    println!("fixtures      {}  {} expectations checked", if bad.is_empty() { "PASS" } else { "FAIL" }, checks.len());
    for k in &bad {
        println!("    failed: {} {}", k.name, k.detail);
    }
    if !bad.is_empty() {
        failed.push("fixtures".into());
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass\n");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED {}\n", failed.join(", "));
        ExitCode::FAILURE
    }
}
