//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;

use p1energy::checks::{run_checks, CheckConfig};

fn main() -> ExitCode {
    let results = run_checks(&CheckConfig::default());
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
