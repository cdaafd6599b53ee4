//! Randomized equivalence checking of lowered plans against the oracle.
//!
//! Each trial draws a well-shaped statement, lowers it, executes both the
//! plain and the specialized plan, and compares the destination with
//! [`oracle::eval_stmt`](crate::oracle::eval_stmt).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{
    build_add, build_func, build_matvec, build_scalmul, build_sub, BinOp, Expr, FuncId,
};
use crate::kernels::{exec_plan, Matrix, Workspace};
use crate::lower::{alias_guard, lower, specialize, AliasStrategy, AssignMode, Statement};
use crate::oracle::eval_stmt;

/// Tolerance for plan-versus-oracle agreement.
pub const REL_TOL: f64 = 1e-12;

/// `|got - want| / max(|want|, 1)`: relative error with an absolute floor
/// at unit scale, so components that cancel to near zero are not judged by
/// a vanishing denominator.
pub fn rel_err(got: f64, want: f64) -> f64 {
    if got == want {
        return 0.0;
    }
    (got - want).abs() / want.abs().max(1.0)
}

pub fn max_rel_err(got: &[f64], want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .map(|(g, w)| rel_err(*g, *w))
        .fold(0.0, f64::max)
}

/// Bitwise equality of every vector in two workspaces.
pub fn bit_identical(a: &Workspace, b: &Workspace) -> bool {
    let bits = |ws: &Workspace| -> Vec<(String, Vec<u64>)> {
        ws.vectors()
            .map(|(n, v)| (n.to_string(), v.iter().map(|x| x.to_bits()).collect()))
            .collect()
    };
    bits(a) == bits(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Len {
    Main,
    Side,
}

const VECTORS: [&str; 5] = ["a0", "a1", "a2", "a3", "a4"];
const SIDE_VECTORS: [&str; 2] = ["b0", "b1"];
const POSITIVE: [&str; 2] = ["p0", "p1"];
const SIDE_POSITIVE: [&str; 1] = ["q0"];
const SCALARS: [&str; 4] = ["s0", "s1", "s2", "s3"];
/// Fresh destination never read by generated expressions.
pub const OUTPUT: &str = "out";

/// Names, shapes and value ranges of the workspace used by random trials.
///
/// Main vectors have length `len`, side vectors `len / 2` (at least 1);
/// `M0` is square, `M1` maps side to main and `M2` main to side. Names
/// starting with `p`/`q` hold values in (0.5, 1.5] for `log` arguments.
pub fn random_workspace<R: Rng>(rng: &mut R, len: usize) -> Workspace {
    let len = len.max(1);
    let side = (len / 2).max(1);
    let mut ws = Workspace::new();
    let uniform = |n: usize, lo: f64, hi: f64, rng: &mut R| -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(lo..hi)).collect()
    };
    for name in VECTORS.iter().chain([&OUTPUT]) {
        ws.bind_vector(*name, uniform(len, -1.0, 1.0, rng)).unwrap();
    }
    for name in SIDE_VECTORS {
        ws.bind_vector(name, uniform(side, -1.0, 1.0, rng)).unwrap();
    }
    for name in POSITIVE {
        let v = (0..len).map(|_| 1.5 - rng.gen_range(0.0..1.0)).collect();
        ws.bind_vector(name, v).unwrap();
    }
    for name in SIDE_POSITIVE {
        let v = (0..side).map(|_| 1.5 - rng.gen_range(0.0..1.0)).collect();
        ws.bind_vector(name, v).unwrap();
    }
    for (name, rows, cols) in [("M0", len, len), ("M1", len, side), ("M2", side, len)] {
        let data = uniform(rows * cols, -1.0, 1.0, rng);
        ws.bind_matrix(name, Matrix::new(rows, cols, data).unwrap())
            .unwrap();
    }
    for name in SCALARS {
        ws.bind_scalar(name, rng.gen_range(-2.0..=2.0)).unwrap();
    }
    ws
}

/// Shape of randomly generated statements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub max_depth: usize,
    /// When false, literals are drawn from [0, 2] so every tree has a textual
    /// form (the grammar has no unary minus).
    pub negative_literals: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 6,
            negative_literals: true,
        }
    }
}

struct Gen<'r, R> {
    rng: &'r mut R,
    cfg: GenConfig,
}

impl<R: Rng> Gen<'_, R> {
    fn leaf(&mut self, len: Len) -> Expr {
        let names: &[&str] = match len {
            Len::Main => &VECTORS,
            Len::Side => &SIDE_VECTORS,
        };
        Expr::vector(*names.choose(self.rng).unwrap())
    }

    fn positive_leaf(&mut self, len: Len) -> Expr {
        let names: &[&str] = match len {
            Len::Main => &POSITIVE,
            Len::Side => &SIDE_POSITIVE,
        };
        Expr::vector(*names.choose(self.rng).unwrap())
    }

    fn literal(&mut self, positive: bool) -> f64 {
        let lo = if positive {
            0.125
        } else if self.cfg.negative_literals {
            -2.0
        } else {
            0.0
        };
        // Quarter steps keep literals short when rendered.
        (self.rng.gen_range(lo..=2.0_f64) * 4.0).round() / 4.0
    }

    fn scalar(&mut self) -> Expr {
        if self.rng.gen_bool(0.5) {
            Expr::scalar(*SCALARS.choose(self.rng).unwrap())
        } else {
            let v = self.literal(false);
            Expr::scalar(v)
        }
    }

    fn vector(&mut self, len: Len, depth: usize, in_matvec: bool) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.leaf(len);
        }
        let d = depth - 1;
        let choice = self.rng.gen_range(0..if in_matvec { 10 } else { 11 });
        match choice {
            0..=2 => build_add(
                self.vector(len, d, in_matvec),
                self.vector(len, d, in_matvec),
            )
            .unwrap(),
            3..=5 => build_sub(
                self.vector(len, d, in_matvec),
                self.vector(len, d, in_matvec),
            )
            .unwrap(),
            6 | 7 => {
                let c = self.scalar();
                build_scalmul(c, self.vector(len, d, in_matvec)).unwrap()
            }
            8 => build_func(
                *[FuncId::Sin, FuncId::Cos].choose(self.rng).unwrap(),
                self.vector(len, d, in_matvec),
            )
            .unwrap(),
            9 => build_func(FuncId::Log, self.positive(len, d)).unwrap(),
            _ => {
                let (mat, operand) = match (len, self.rng.gen_bool(0.5)) {
                    (Len::Main, true) => ("M0", Len::Main),
                    (Len::Main, false) => ("M1", Len::Side),
                    (Len::Side, _) => ("M2", Len::Main),
                };
                build_matvec(Expr::matrix(mat), self.vector(operand, d, true)).unwrap()
            }
        }
    }

    /// A vector expression whose components are all strictly positive.
    fn positive(&mut self, len: Len, depth: usize) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return self.positive_leaf(len);
        }
        let d = depth - 1;
        if self.rng.gen_bool(0.5) {
            build_add(self.positive(len, d), self.positive(len, d)).unwrap()
        } else {
            let c = self.literal(true);
            build_scalmul(Expr::scalar(c), self.positive(len, d)).unwrap()
        }
    }
}

/// Random expression over the [`random_workspace`] names, of main length.
pub fn random_expr<R: Rng>(rng: &mut R, cfg: GenConfig) -> Expr {
    Gen { rng, cfg }.vector(Len::Main, cfg.max_depth, false)
}

/// Random statement over the [`random_workspace`] names. Destinations are
/// either [`OUTPUT`] or an input vector, so aliasing patterns are covered,
/// including the in-place forms `y = y + ...` and `y = c*y + ...`.
pub fn random_statement<R: Rng>(rng: &mut R, cfg: GenConfig) -> Statement {
    let mode = match rng.gen_range(0..5) {
        0 => AssignMode::PlusAssign,
        1 => AssignMode::MinusAssign,
        _ => AssignMode::Assign,
    };
    let dst = if rng.gen_bool(0.5) {
        OUTPUT
    } else {
        *VECTORS.choose(rng).unwrap()
    };
    let mut g = Gen { rng, cfg };
    let mut rhs = g.vector(Len::Main, cfg.max_depth, false);
    if dst != OUTPUT && cfg.max_depth >= 2 && g.rng.gen_bool(0.3) {
        let head = if g.rng.gen_bool(0.5) {
            Expr::vector(dst)
        } else {
            let c = g.scalar();
            build_scalmul(c, Expr::vector(dst)).unwrap()
        };
        let tail = g.vector(Len::Main, cfg.max_depth - 2, false);
        rhs = if g.rng.gen_bool(0.5) {
            build_add(head, tail).unwrap()
        } else {
            build_sub(head, tail).unwrap()
        };
    }
    Statement::new(dst, mode, rhs)
}

/// Temporaries a statement needs: one per function or product whose vector
/// operand is not a plain name, plus one when the destination is read in a
/// position other than the leftmost unit.
pub fn expected_temps(stmt: &Statement) -> usize {
    let mut n = 0;
    stmt.rhs.visit(&mut |e| match e {
        Expr::Func { arg, .. } if !arg.is_leaf() => n += 1,
        Expr::Binary {
            op: BinOp::ScalMul | BinOp::MatVec,
            right,
            ..
        } if !right.is_leaf() => n += 1,
        _ => {}
    });
    n + usize::from(alias_guard(stmt) == AliasStrategy::ViaTemp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub trials: usize,
    pub max_depth: usize,
    pub len: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            trials: 1000,
            max_depth: 6,
            len: 128,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    pub trial: usize,
    pub statement: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub trials: usize,
    pub passed: usize,
    pub max_rel_err: f64,
    /// Instruction counts summed over all trials, before and after
    /// specialization.
    pub instrs_plain: usize,
    pub instrs_specialized: usize,
    pub failures: Vec<CheckFailure>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.trials
    }

    pub fn summary(&self) -> String {
        format!(
            "{}/{} pass, max rel err {:.3e} (tolerance {:.0e})",
            self.passed, self.trials, self.max_rel_err, REL_TOL
        )
    }
}

/// Outcome of one statement: the max relative error against the oracle and
/// the plain/specialized instruction counts.
pub fn check_statement(stmt: &Statement, ws: &Workspace) -> Result<(f64, usize, usize), String> {
    let plan = lower(stmt, ws).map_err(|e| format!("lowering failed: {e}"))?;
    plan.validate().map_err(|e| format!("invalid plan: {e}"))?;
    let temps = expected_temps(stmt);
    if plan.temp_count() != temps {
        return Err(format!(
            "plan allocates {} temporaries, expected {temps}",
            plan.temp_count()
        ));
    }
    let spec = specialize(&plan);
    if spec.len() > plan.len() {
        return Err("specialization grew the plan".into());
    }

    let mut want = ws.clone();
    eval_stmt(stmt, &mut want).map_err(|e| format!("oracle failed: {e}"))?;
    let mut got = ws.clone();
    exec_plan(&plan, &mut got).map_err(|e| format!("execution failed: {e}"))?;
    let mut got_spec = ws.clone();
    exec_plan(&spec, &mut got_spec).map_err(|e| format!("specialized execution failed: {e}"))?;

    if !bit_identical(&got, &got_spec) {
        return Err("specialized plan is not bit-identical".into());
    }
    let mut err = 0.0_f64;
    for (name, want_v) in want.vectors() {
        let got_v = got.vector(name).expect("same names");
        if name != stmt.dst && got_v != want_v {
            return Err(format!("plan modified `{name}`"));
        }
        err = err.max(max_rel_err(got_v, want_v));
    }
    if !err.is_finite() || err > REL_TOL {
        return Err(format!("relative error {err:.3e} exceeds {REL_TOL:.0e}"));
    }
    Ok((err, plan.len(), spec.len()))
}

pub fn run_check(cfg: &CheckConfig) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ws = random_workspace(&mut rng, cfg.len);
    let gen = GenConfig {
        max_depth: cfg.max_depth,
        negative_literals: true,
    };
    let mut report = CheckReport {
        trials: cfg.trials,
        passed: 0,
        max_rel_err: 0.0,
        instrs_plain: 0,
        instrs_specialized: 0,
        failures: Vec::new(),
    };
    for trial in 0..cfg.trials {
        let stmt = random_statement(&mut rng, gen);
        match check_statement(&stmt, &ws) {
            Ok((err, plain, spec)) => {
                report.passed += 1;
                report.max_rel_err = report.max_rel_err.max(err);
                report.instrs_plain += plain;
                report.instrs_specialized += spec;
            }
            Err(reason) => report.failures.push(CheckFailure {
                trial,
                statement: stmt.to_string(),
                reason,
            }),
        }
    }
    report
}
