//! One line per acceptance criterion. Criterion 7 is recorded, not asserted.

use std::process::ExitCode;

use announce_core::suite;

const SEED: u64 = 2024;
const CB_BUDGET: u64 = 1 << 22;

fn main() -> ExitCode {
    let results = suite::acceptance(SEED, Some(CB_BUDGET));
    let mut failed = Vec::new();
    for r in &results {
        println!("{} ({} ms)", r.line(), r.elapsed_ms);
        if r.asserted && !r.passed {
            failed.push(r.id);
        }
    }
    let ids: Vec<u8> = results.iter().map(|r| r.id).collect();
    if ids != (1..=8).collect::<Vec<u8>>() {
        println!("acceptance: expected criteria 1-8, got {ids:?}");
        return ExitCode::FAILURE;
    }
    if failed.is_empty() {
        println!("acceptance: all asserted criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
