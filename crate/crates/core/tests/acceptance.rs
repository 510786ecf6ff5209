//! Runs the twelve acceptance criteria and prints one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use numvol::verify::{run_criterion, summary_line, VerifyConfig};

fn main() -> ExitCode {
    let config = VerifyConfig::default();
    let mut failed = 0;
    for id in 1..=12 {
        let start = Instant::now();
        match run_criterion(id, &config) {
            Ok(report) => {
                println!("{}  ({:.1}s)", summary_line(&report), start.elapsed().as_secs_f64());
                if !report.passed {
                    failed += 1;
                    for c in report.checks.iter().filter(|c| !c.passed) {
                        println!("       {}: measured {:e}, bound {:e}{}", c.name, c.measured, c.bound,
                            c.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default());
                    }
                }
            }
            Err(e) => {
                println!("FAIL {id:>2} error: {e}");
                failed += 1;
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
