use kernelplan::bench::{run_bench, BenchConfig, Workload, CHECKSUM_TOL};
use kernelplan::check::rel_err;

fn small(seed: u64, size: usize) -> BenchConfig {
    BenchConfig {
        size,
        reps: Some(7),
        seed,
        ..BenchConfig::default()
    }
}

#[test]
fn rows_are_stable_apart_from_timing() {
    let strip = |csv: String| -> Vec<String> {
        csv.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(4);
                f.join(",")
            })
            .collect()
    };
    let a = run_bench(&small(3, 40)).unwrap().to_csv();
    let b = run_bench(&small(3, 40)).unwrap().to_csv();
    assert_eq!(strip(a), strip(b));
}

#[test]
fn checksums_agree_across_seeds_and_sizes() {
    for seed in [0, 1, 99] {
        for size in [1, 2, 33, 128] {
            let report = run_bench(&small(seed, size)).unwrap();
            assert_eq!(report.rows.len(), 12);
            assert!(
                report.checksum_mismatches().is_empty(),
                "seed {seed} size {size}"
            );
            for w in Workload::ALL {
                let sums: Vec<f64> = report
                    .rows
                    .iter()
                    .filter(|r| r.workload == w.id())
                    .map(|r| r.checksum)
                    .collect();
                assert_eq!(sums.len(), 4);
                for s in &sums {
                    assert!(rel_err(*s, sums[0]) <= CHECKSUM_TOL);
                }
            }
        }
    }
}
