//! The verification suite at its pinned settings: one line per check, and a
//! nonzero exit if any check fails.

use std::process::ExitCode;

use rateless_dmt_cli::verify::{run_checks_with, VerifyOptions};

fn main() -> ExitCode {
    let checks = run_checks_with(&VerifyOptions::default(), |c| println!("{c}"));
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("acceptance: {}/{} checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
