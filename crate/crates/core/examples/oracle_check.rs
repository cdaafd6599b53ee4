//! Random statements, lowered and executed, compared to single-loop
//! evaluation.
//!
//! `cargo run --release --example oracle_check -- 5000`

use kernelplan::check::{run_check, CheckConfig};

fn main() {
    let trials = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000);
    for seed in 0..3 {
        let report = run_check(&CheckConfig {
            trials,
            seed,
            ..CheckConfig::default()
        });
        println!(
            "seed {seed}: {}; {} -> {} instructions after specialization",
            report.summary(),
            report.instrs_plain,
            report.instrs_specialized
        );
        for f in report.failures.iter().take(5) {
            println!("  trial {}: {}\n    {}", f.trial, f.statement, f.reason);
        }
    }
}
