//! Benchmark workloads and evaluation strategies.
//!
//! Three workloads exercise short products, long linear combinations, and
//! sums of elementwise functions with temporaries:
//!
//! | id    | statements                                                           | reps   |
//! |-------|----------------------------------------------------------------------|--------|
//! | test1 | `x = A*y`; `y = y + c*x`                                              | 1000   |
//! | test2 | `y = y + c1*u1 + ... + c7*u7`; `y = c8*y`                             | 100000 |
//! | test3 | `y = y + log(u1) - cos(c2*u2 + u3) + sin(c4*u4 + c5*u5 - u6)`; `y = c6*y` | 50000  |
//!
//! Each workload runs under four strategies: `naive` allocates a fresh vector
//! for every operator, `oracle-loop` evaluates each statement in one
//! per-component loop, and `kernel-plan` / `kernel-plan-specialized` execute
//! the lowered plans. Every strategy starts from the same seeded data, so the
//! final checksums (sum of `y`) are comparable.

use std::borrow::Cow;
use std::fmt;
use std::io;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{BinOp, Expr, Scalar};
use crate::kernels::{exec_plan, KernelError, Matrix, Workspace};
use crate::lower::{lower, specialize, AssignMode, KernelPlan, LowerError, Statement};
use crate::oracle::{eval_stmt, OracleError};
use crate::parser::{parse_statement, ParseError};

/// Cross-strategy checksum tolerance.
pub const CHECKSUM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("size must be at least 1")]
    BadSize,
    #[error("reps must be at least 1")]
    BadReps,
    #[error("unknown workload `{0}` (expected 1, 2, 3 or all)")]
    UnknownWorkload(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Lower(#[from] LowerError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Workload {
    Test1,
    Test2,
    Test3,
}

impl Workload {
    pub const ALL: [Workload; 3] = [Workload::Test1, Workload::Test2, Workload::Test3];

    pub fn id(self) -> &'static str {
        match self {
            Workload::Test1 => "test1",
            Workload::Test2 => "test2",
            Workload::Test3 => "test3",
        }
    }

    pub fn default_reps(self) -> usize {
        match self {
            Workload::Test1 => 1000,
            Workload::Test2 => 100_000,
            Workload::Test3 => 50_000,
        }
    }

    pub fn statements(self) -> &'static [&'static str] {
        match self {
            Workload::Test1 => &["x = A*y", "y = y + c*x"],
            Workload::Test2 => &[
                "y = y + c1*u1 + c2*u2 + c3*u3 + c4*u4 + c5*u5 + c6*u6 + c7*u7",
                "y = c8*y",
            ],
            Workload::Test3 => &[
                "y = y + log(u1) - cos(c2*u2 + u3) + sin(c4*u4 + c5*u5 - u6)",
                "y = c6*y",
            ],
        }
    }

    /// Seeded input data of the given size.
    ///
    /// Constants are chosen so that repeated application stays bounded:
    /// test1 uses a nonnegative `A` with entries in [0, 1/n] and `c = -0.5`,
    /// tests 2 and 3 end with a contraction `y = 0.5*y`. `log` inputs lie in
    /// (0.5, 1.5].
    pub fn workspace(self, size: usize, seed: u64) -> Workspace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (self as u64 + 1).wrapping_mul(0x9e37));
        let mut ws = Workspace::new();
        let vec = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| -> Vec<f64> {
            (0..size).map(|_| rng.gen_range(lo..hi)).collect()
        };
        match self {
            Workload::Test1 => {
                let scale = 1.0 / size as f64;
                let data = (0..size * size)
                    .map(|_| rng.gen_range(0.0..1.0) * scale)
                    .collect();
                ws.bind_matrix("A", Matrix::new(size, size, data).unwrap())
                    .unwrap();
                ws.bind_vector("x", vec![0.0; size]).unwrap();
                ws.bind_vector("y", vec(&mut rng, -1.0, 1.0)).unwrap();
                ws.bind_scalar("c", -0.5).unwrap();
            }
            Workload::Test2 => {
                ws.bind_vector("y", vec(&mut rng, -1.0, 1.0)).unwrap();
                for k in 1..=7 {
                    ws.bind_vector(format!("u{k}"), vec(&mut rng, -1.0, 1.0))
                        .unwrap();
                    ws.bind_scalar(format!("c{k}"), rng.gen_range(-1.0..1.0))
                        .unwrap();
                }
                ws.bind_scalar("c8", 0.5).unwrap();
            }
            Workload::Test3 => {
                ws.bind_vector("y", vec(&mut rng, -1.0, 1.0)).unwrap();
                let u1 = (0..size).map(|_| 1.5 - rng.gen_range(0.0..1.0)).collect();
                ws.bind_vector("u1", u1).unwrap();
                for k in 2..=6 {
                    ws.bind_vector(format!("u{k}"), vec(&mut rng, -1.0, 1.0))
                        .unwrap();
                }
                for k in [2, 4, 5] {
                    ws.bind_scalar(format!("c{k}"), rng.gen_range(-1.0..1.0))
                        .unwrap();
                }
                ws.bind_scalar("c6", 0.5).unwrap();
            }
        }
        ws
    }

    pub fn parse(self, ws: &Workspace) -> Result<Vec<Statement>, ParseError> {
        self.statements()
            .iter()
            .map(|s| parse_statement(s, ws))
            .collect()
    }

    /// Unspecialized plans for the workload's statements.
    pub fn plans(self, ws: &Workspace) -> Result<Vec<KernelPlan>, BenchError> {
        self.parse(ws)?
            .iter()
            .map(|s| {
                let mut p = lower(s, ws)?;
                p.source_stmt = Some(s.to_string());
                Ok(p)
            })
            .collect()
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Parses `1`, `2`, `3` or `all` (also `test1` etc).
pub fn parse_workloads(s: &str) -> Result<Vec<Workload>, BenchError> {
    match s.trim().trim_start_matches("test") {
        "1" => Ok(vec![Workload::Test1]),
        "2" => Ok(vec![Workload::Test2]),
        "3" => Ok(vec![Workload::Test3]),
        "all" => Ok(Workload::ALL.to_vec()),
        _ => Err(BenchError::UnknownWorkload(s.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Naive,
    OracleLoop,
    KernelPlan,
    KernelPlanSpecialized,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Naive,
        Strategy::OracleLoop,
        Strategy::KernelPlan,
        Strategy::KernelPlanSpecialized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::OracleLoop => "oracle-loop",
            Strategy::KernelPlan => "kernel-plan",
            Strategy::KernelPlanSpecialized => "kernel-plan-specialized",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Strategy, BenchError> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| BenchError::UnknownStrategy(s.to_string()))
    }
}

/// Evaluates `e` with one freshly allocated vector per operator, the way
/// plain operator overloading does.
pub fn naive_eval<'w>(e: &Expr, ws: &'w Workspace) -> Result<Cow<'w, [f64]>, BenchError> {
    let scalar = |s: &Scalar| -> Result<f64, BenchError> {
        match s {
            Scalar::Literal(v) => Ok(*v),
            Scalar::Named(n) => ws
                .scalar(n)
                .ok_or_else(|| KernelError::UnboundScalar(n.clone()).into()),
        }
    };
    Ok(match e {
        Expr::Vector(n) => Cow::Borrowed(
            ws.vector(n)
                .ok_or_else(|| KernelError::UnboundVector(n.clone()))?,
        ),
        Expr::Binary { op, left, right } => match op {
            BinOp::Add | BinOp::Sub => {
                let l = naive_eval(left, ws)?;
                let r = naive_eval(right, ws)?;
                let out = l.iter().zip(r.iter());
                Cow::Owned(if *op == BinOp::Add {
                    out.map(|(a, b)| a + b).collect()
                } else {
                    out.map(|(a, b)| a - b).collect()
                })
            }
            BinOp::ScalMul => {
                let Expr::Scalar(s) = left.as_ref() else {
                    unreachable!("scalar products keep the scalar on the left")
                };
                let c = scalar(s)?;
                let v = naive_eval(right, ws)?;
                Cow::Owned(v.iter().map(|x| c * x).collect())
            }
            BinOp::MatVec => {
                let Expr::Matrix(name) = left.as_ref() else {
                    unreachable!("matrix products keep the matrix on the left")
                };
                let m = ws
                    .matrix(name)
                    .ok_or_else(|| KernelError::UnboundMatrix(name.clone()))?;
                let v = naive_eval(right, ws)?;
                Cow::Owned(
                    (0..m.rows())
                        .map(|i| {
                            let mut acc = 0.0;
                            for (a, b) in m.row(i).iter().zip(v.iter()) {
                                acc += a * b;
                            }
                            acc
                        })
                        .collect(),
                )
            }
        },
        Expr::Func { func, arg } => {
            let v = naive_eval(arg, ws)?;
            let out: Result<Vec<f64>, KernelError> = v
                .iter()
                .enumerate()
                .map(|(index, &x)| {
                    func.eval(x).ok_or(KernelError::Domain {
                        func: *func,
                        index,
                        value: x,
                    })
                })
                .collect();
            Cow::Owned(out?)
        }
        Expr::Scalar(_) | Expr::Matrix(_) => {
            unreachable!("statements are shape-checked before evaluation")
        }
    })
}

fn naive_stmt(stmt: &Statement, ws: &mut Workspace) -> Result<(), BenchError> {
    let value = naive_eval(&stmt.rhs, ws)?.into_owned();
    let dst = ws
        .vector_mut(&stmt.dst)
        .ok_or_else(|| KernelError::UnboundVector(stmt.dst.clone()))?;
    match stmt.mode {
        AssignMode::Assign => dst.copy_from_slice(&value),
        AssignMode::PlusAssign => dst.iter_mut().zip(&value).for_each(|(d, v)| *d += v),
        AssignMode::MinusAssign => dst.iter_mut().zip(&value).for_each(|(d, v)| *d -= v),
    }
    Ok(())
}

enum Prepared {
    Statements(Vec<Statement>),
    Plans(Vec<KernelPlan>),
}

impl Prepared {
    fn new(strategy: Strategy, w: Workload, ws: &Workspace) -> Result<Prepared, BenchError> {
        Ok(match strategy {
            Strategy::Naive | Strategy::OracleLoop => Prepared::Statements(w.parse(ws)?),
            Strategy::KernelPlan => Prepared::Plans(w.plans(ws)?),
            Strategy::KernelPlanSpecialized => {
                Prepared::Plans(w.plans(ws)?.iter().map(specialize).collect())
            }
        })
    }

    fn rep(&self, strategy: Strategy, ws: &mut Workspace) -> Result<(), BenchError> {
        match self {
            Prepared::Statements(stmts) => {
                for s in stmts {
                    if strategy == Strategy::Naive {
                        naive_stmt(s, ws)?;
                    } else {
                        eval_stmt(s, ws)?;
                    }
                }
            }
            Prepared::Plans(plans) => {
                for p in plans {
                    exec_plan(p, ws)?;
                }
            }
        }
        Ok(())
    }
}

/// One CSV row: `workload,strategy,size,reps,seconds,checksum`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub workload: String,
    pub strategy: String,
    pub size: usize,
    pub reps: usize,
    pub seconds: f64,
    pub checksum: f64,
}

/// Runs one workload under one strategy: seeded setup, one untimed warmup
/// repetition, then `reps` timed repetitions.
pub fn run_one(
    w: Workload,
    strategy: Strategy,
    size: usize,
    reps: usize,
    seed: u64,
) -> Result<BenchRow, BenchError> {
    if size == 0 {
        return Err(BenchError::BadSize);
    }
    if reps == 0 {
        return Err(BenchError::BadReps);
    }
    let mut ws = w.workspace(size, seed);
    let prepared = Prepared::new(strategy, w, &ws)?;
    prepared.rep(strategy, &mut ws)?;
    let start = Instant::now();
    for _ in 0..reps {
        prepared.rep(strategy, &mut ws)?;
    }
    let seconds = start.elapsed().as_secs_f64();
    let checksum = ws.vector("y").expect("every workload has y").iter().sum();
    Ok(BenchRow {
        workload: w.id().to_string(),
        strategy: strategy.name().to_string(),
        size,
        reps,
        seconds,
        checksum,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub workloads: Vec<Workload>,
    pub strategies: Vec<Strategy>,
    pub size: usize,
    /// Overrides each workload's default repetition count.
    pub reps: Option<usize>,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            workloads: Workload::ALL.to_vec(),
            strategies: Strategy::ALL.to_vec(),
            size: 1000,
            reps: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

/// A workload whose strategies disagree on the final checksum.
#[derive(Debug, Clone, PartialEq)]
pub struct ChecksumMismatch {
    pub workload: String,
    pub strategy: String,
    pub checksum: f64,
    pub reference: f64,
}

impl BenchReport {
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Rows whose checksum differs from the first row of the same workload
    /// by more than [`CHECKSUM_TOL`] relative.
    pub fn checksum_mismatches(&self) -> Vec<ChecksumMismatch> {
        let mut out = Vec::new();
        for w in Workload::ALL {
            let rows: Vec<&BenchRow> = self.rows.iter().filter(|r| r.workload == w.id()).collect();
            let Some(first) = rows.first() else { continue };
            for r in &rows[1..] {
                let scale = first
                    .checksum
                    .abs()
                    .max(r.checksum.abs())
                    .max(f64::MIN_POSITIVE);
                let rel = (r.checksum - first.checksum).abs() / scale;
                if rel.is_nan() || rel > CHECKSUM_TOL {
                    out.push(ChecksumMismatch {
                        workload: r.workload.clone(),
                        strategy: r.strategy.clone(),
                        checksum: r.checksum,
                        reference: first.checksum,
                    });
                }
            }
        }
        out
    }

    /// Human-readable timing ratios against the specialized kernel plan
    /// (or the fastest strategy when that one was not run).
    pub fn ratio_table(&self) -> String {
        let mut s = String::new();
        for w in Workload::ALL {
            let rows: Vec<&BenchRow> = self.rows.iter().filter(|r| r.workload == w.id()).collect();
            if rows.is_empty() {
                continue;
            }
            let base = rows
                .iter()
                .find(|r| r.strategy == Strategy::KernelPlanSpecialized.name())
                .map(|r| r.seconds)
                .unwrap_or_else(|| rows.iter().map(|r| r.seconds).fold(f64::INFINITY, f64::min));
            for r in rows {
                let ratio = if base > 0.0 {
                    r.seconds / base
                } else {
                    f64::NAN
                };
                s.push_str(&format!(
                    "{:<6} {:<24} {:>10.4}s  x{:.2}\n",
                    r.workload, r.strategy, r.seconds, ratio
                ));
            }
        }
        s
    }
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    if cfg.size == 0 {
        return Err(BenchError::BadSize);
    }
    if cfg.reps == Some(0) {
        return Err(BenchError::BadReps);
    }
    let mut report = BenchReport::default();
    for &w in &cfg.workloads {
        let reps = cfg.reps.unwrap_or(w.default_reps());
        for &s in &cfg.strategies {
            report.rows.push(run_one(w, s, cfg.size, reps, cfg.seed)?);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lower::Instruction;

    #[test]
    fn workloads_parse_and_lower() {
        for w in Workload::ALL {
            let ws = w.workspace(5, 1);
            let plans = w.plans(&ws).unwrap();
            assert_eq!(plans.len(), 2);
            for p in &plans {
                p.validate().unwrap();
            }
        }
    }

    #[test]
    fn test2_plan_shape() {
        let ws = Workload::Test2.workspace(4, 0);
        let plans = Workload::Test2.plans(&ws).unwrap();
        let first = specialize(&plans[0]);
        assert_eq!(first.count(|i| matches!(i, Instruction::Axpy { .. })), 7);
        assert_eq!(first.len(), 7);
        assert_eq!(plans[1].instrs.len(), 1);
        assert!(matches!(plans[1].instrs[0], Instruction::Scal { .. }));
    }

    #[test]
    fn naive_matches_oracle_on_each_workload() {
        for w in Workload::ALL {
            let mut a = w.workspace(6, 3);
            let mut b = a.clone();
            for s in w.parse(&a).unwrap() {
                naive_stmt(&s, &mut a).unwrap();
                eval_stmt(&s, &mut b).unwrap();
            }
            assert_eq!(a, b, "{w}");
        }
    }

    #[test]
    fn strategies_agree_on_small_runs() {
        let report = run_bench(&BenchConfig {
            size: 8,
            reps: Some(20),
            seed: 5,
            ..BenchConfig::default()
        })
        .unwrap();
        assert_eq!(report.rows.len(), 12);
        assert!(report.checksum_mismatches().is_empty());
        let csv = report.to_csv();
        assert!(csv.starts_with("workload,strategy,size,reps,seconds,checksum\n"));
        assert_eq!(csv.lines().count(), 13);
    }

    #[test]
    fn degenerate_size() {
        let row = run_one(Workload::Test1, Strategy::KernelPlan, 1, 3, 0).unwrap();
        assert_eq!(row.size, 1);
        assert!(row.checksum.is_finite());
        assert!(matches!(
            run_one(Workload::Test1, Strategy::Naive, 0, 3, 0),
            Err(BenchError::BadSize)
        ));
        assert!(matches!(
            run_one(Workload::Test1, Strategy::Naive, 3, 0, 0),
            Err(BenchError::BadReps)
        ));
    }

    #[test]
    fn selectors() {
        assert_eq!(parse_workloads("all").unwrap().len(), 3);
        assert_eq!(parse_workloads("2").unwrap(), vec![Workload::Test2]);
        assert!(parse_workloads("4").is_err());
        assert_eq!(
            "kernel-plan".parse::<Strategy>().unwrap(),
            Strategy::KernelPlan
        );
        assert!("fast".parse::<Strategy>().is_err());
    }

    #[test]
    fn mismatch_detection() {
        let row = |s: &str, c: f64| BenchRow {
            workload: "test1".into(),
            strategy: s.into(),
            size: 1,
            reps: 1,
            seconds: 0.0,
            checksum: c,
        };
        let report = BenchReport {
            rows: vec![
                row("naive", 1.0),
                row("kernel-plan", 1.0 + 1e-12),
                row("x", 1.1),
            ],
        };
        let m = report.checksum_mismatches();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].strategy, "x");
    }
}
