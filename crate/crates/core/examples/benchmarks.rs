//! A reduced run of the three benchmark workloads under every strategy.
//!
//! `cargo run --release --example benchmarks -- 1000`

use kernelplan::bench::{run_bench, BenchConfig};

fn main() {
    let size = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let report = run_bench(&BenchConfig {
        size,
        reps: Some(200),
        ..BenchConfig::default()
    })
    .unwrap();
    print!("{}", report.to_csv());
    println!();
    print!("{}", report.ratio_table());
    for m in report.checksum_mismatches() {
        println!("mismatch: {m:?}");
    }
}
