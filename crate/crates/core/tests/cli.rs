use std::process::{Command, Output};

fn kernelplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kernelplan"))
        .args(args)
        .env_remove("KERNELPLAN_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn explain_three_term_sum() {
    let o = kernelplan(&["explain", "X = A+B+C"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(stdout(&o).starts_with("COPY dst=X src=A\n"));
}

#[test]
fn explain_specialized_vadd() {
    let o = kernelplan(&["explain", "--specialize", "X = A+B"]);
    assert_eq!(stdout(&o), "VADD dst=X a=A b=B\n");
}

#[test]
fn explain_in_place_axpy() {
    let o = kernelplan(&["explain", "--scalar", "c1", "y = y + c1*u1"]);
    assert_eq!(stdout(&o), "AXPY dst=y sign=+ alpha=c1 src=u1\n");
}

#[test]
fn explain_json_parses() {
    let o = kernelplan(&["explain", "--json", "--len", "8", "X = sin(A+B+C)"]);
    assert_eq!(o.status.code(), Some(0));
    let plan = kernelplan::lower::plan_from_json(&stdout(&o)).unwrap();
    assert_eq!(plan.temp_count(), 1);
    assert_eq!(plan.temps.values().copied().collect::<Vec<_>>(), [8]);
}

#[test]
fn parse_errors_exit_2() {
    let o = kernelplan(&["explain", "X = A + (B"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("column"), "{}", stderr(&o));
    assert_eq!(kernelplan(&[]).status.code(), Some(2));
    assert_eq!(
        kernelplan(&["check", "--trials", "x"]).status.code(),
        Some(2)
    );
}

#[test]
fn check_reports_summary() {
    let o = kernelplan(&["check", "--trials", "200", "--len", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("200/200 pass, max rel err"));
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_kernelplan"));
        cmd.args([
            "bench",
            "--test",
            "3",
            "--size",
            "16",
            "--reps",
            "3",
            "--strategies",
            "naive",
        ])
        .args(extra)
        .env_remove("KERNELPLAN_SEED");
        if let Some(s) = seed {
            cmd.env("KERNELPLAN_SEED", s);
        }
        let o = cmd.output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        let row = text.lines().nth(1).unwrap().to_string();
        row.rsplit(',').next().unwrap().to_string()
    };
    let default = run(None, &[]);
    assert_eq!(run(Some("0"), &[]), default);
    assert_ne!(run(Some("5"), &[]), default);
    assert_eq!(run(Some("5"), &["--seed", "0"]), default);
}

#[test]
fn bench_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = kernelplan(&[
        "bench",
        "--size",
        "20",
        "--reps",
        "4",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "workload,strategy,size,reps,seconds,checksum");
    assert_eq!(lines.len(), 13);
    assert!(stderr(&o).contains("kernel-plan-specialized"));
}
