//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use gmf_core::verify::{run_criterion, CRITERIA};

const SEED: u64 = 20_240_601;

fn main() {
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let outcome = run_criterion(id, SEED).expect("known criterion");
        println!("{outcome}");
        if !outcome.passed {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
