//! Acceptance battery: one line per criterion, nonzero exit if any fails
//! its property or its time budget.

use std::process::ExitCode;

use lpmra::suite::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let filter: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for &(id, title, _) in &CRITERIA {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        match run_criterion(id) {
            Ok(outcome) => {
                println!("{}", outcome.line());
                failed += usize::from(!outcome.passed());
            }
            Err(e) => {
                println!("FAIL [{id:>2}] {title}: error: {e}");
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {} criteria failed", failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
