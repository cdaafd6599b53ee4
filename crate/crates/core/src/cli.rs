//! The `kernelplan` command line: `explain`, `check` and `bench`.
//!
//! Exit codes: 0 on success, 1 when a check or checksum comparison fails,
//! 2 for usage, parse and shape errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{parse_workloads, run_bench, BenchConfig, Strategy};
use crate::check::{run_check, CheckConfig};
use crate::expr::FuncId;
use crate::kernels::{Matrix, Workspace};
use crate::lower::{lower, plan_to_json, render_plan, specialize};
use crate::parser::{parse_statement, tokenize, TokenKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "kernelplan",
    version,
    about = "Lower vector expressions to kernel plans"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the kernel plan of one statement.
    Explain(ExplainArgs),
    /// Compare lowered plans against the single-loop oracle on random statements.
    Check(CheckArgs),
    /// Run the benchmark workloads and write CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Statement text, e.g. "y = y + c1*u1 - cos(c2*u2 + u3)".
    pub statement: String,
    /// Print the plan after the peephole specialization pass.
    #[arg(long)]
    pub specialize: bool,
    /// Print the structured JSON form instead of text.
    #[arg(long)]
    pub json: bool,
    /// Vector declarations `name[:len]`, comma separated. Undeclared names
    /// in the statement are taken to be vectors of the default length.
    #[arg(long = "vec", value_delimiter = ',')]
    pub vectors: Vec<String>,
    /// Matrix declarations `name[:ROWSxCOLS]` (default square of `--len`).
    #[arg(long = "mat", value_delimiter = ',')]
    pub matrices: Vec<String>,
    /// Scalar declarations `name[=value]`.
    #[arg(long = "scalar", value_delimiter = ',')]
    pub scalars: Vec<String>,
    /// Default vector length.
    #[arg(long, default_value_t = 1000)]
    pub len: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 6)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 128)]
    pub len: usize,
    #[arg(long, env = "KERNELPLAN_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Workload: 1, 2, 3 or all.
    #[arg(long, default_value = "all")]
    pub test: String,
    #[arg(long, default_value_t = 1000)]
    pub size: usize,
    /// Repetitions; defaults to 1000, 100000 and 50000 for tests 1, 2 and 3.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated subset of naive, oracle-loop, kernel-plan,
    /// kernel-plan-specialized.
    #[arg(long, value_delimiter = ',')]
    pub strategies: Vec<String>,
    #[arg(long, env = "KERNELPLAN_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn split_decl(decl: &str, sep: char) -> (&str, Option<&str>) {
    match decl.split_once(sep) {
        Some((name, rest)) => (name.trim(), Some(rest.trim())),
        None => (decl.trim(), None),
    }
}

/// Builds a zero-filled workspace from the declarations plus implicit
/// vectors for any undeclared names in `statement`.
pub fn declare_workspace(args: &ExplainArgs) -> Result<Workspace, String> {
    let mut ws = Workspace::new();
    let positive = |what: &str, s: &str| -> Result<usize, String> {
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("invalid {what} `{s}`")),
        }
    };
    if args.len == 0 {
        return Err("--len must be positive".into());
    }
    for d in &args.vectors {
        let (name, len) = split_decl(d, ':');
        let len = len.map_or(Ok(args.len), |l| positive("length", l))?;
        ws.bind_vector(name, vec![0.0; len])
            .map_err(|e| e.to_string())?;
    }
    for d in &args.matrices {
        let (name, dims) = split_decl(d, ':');
        let (rows, cols) = match dims {
            None => (args.len, args.len),
            Some(dims) => {
                let (r, c) = dims
                    .split_once('x')
                    .ok_or_else(|| format!("invalid matrix shape `{dims}`"))?;
                (positive("rows", r)?, positive("cols", c)?)
            }
        };
        ws.bind_matrix(name, Matrix::zeros(rows, cols))
            .map_err(|e| e.to_string())?;
    }
    for d in &args.scalars {
        let (name, value) = split_decl(d, '=');
        let value = value.map_or(Ok(1.0), |v| {
            v.parse::<f64>()
                .map_err(|_| format!("invalid scalar value `{v}`"))
        })?;
        ws.bind_scalar(name, value).map_err(|e| e.to_string())?;
    }
    let tokens = tokenize(&args.statement).map_err(|e| e.to_string())?;
    for t in tokens.iter().filter(|t| t.kind == TokenKind::Ident) {
        if FuncId::from_name(&t.text).is_none() && ws.kind_of(&t.text).is_none() {
            ws.bind_vector(t.text.as_str(), vec![0.0; args.len])
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(ws)
}

pub fn cmd_explain(args: &ExplainArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = declare_workspace(args).and_then(|ws| {
        let stmt = parse_statement(&args.statement, &ws).map_err(|e| e.to_string())?;
        let mut plan = lower(&stmt, &ws).map_err(|e| e.to_string())?;
        plan.source_stmt = Some(args.statement.trim().to_string());
        Ok(if args.specialize {
            specialize(&plan)
        } else {
            plan
        })
    });
    match result {
        Ok(plan) => {
            let text = if args.json {
                plan_to_json(&plan) + "\n"
            } else {
                render_plan(&plan)
            };
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let report = run_check(&CheckConfig {
        trials: args.trials,
        max_depth: args.max_depth,
        len: args.len,
        seed: args.seed,
    });
    for f in &report.failures {
        let _ = writeln!(err, "trial {}: {}: {}", f.trial, f.statement, f.reason);
    }
    let _ = writeln!(out, "{}", report.summary());
    if report.ok() {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config = (|| -> Result<BenchConfig, String> {
        let workloads = parse_workloads(&args.test).map_err(|e| e.to_string())?;
        let strategies = if args.strategies.is_empty() {
            Strategy::ALL.to_vec()
        } else {
            args.strategies
                .iter()
                .map(|s| s.parse::<Strategy>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?
        };
        Ok(BenchConfig {
            workloads,
            strategies,
            size: args.size,
            reps: args.reps,
            seed: args.seed,
        })
    })();
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let report = match run_bench(&config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &args.csv {
        Some(path) => File::create(path)
            .map_err(Into::into)
            .and_then(|f| report.write_csv(f)),
        None => report.write_csv(&mut *out),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_FAIL;
    }
    let _ = err.write_all(report.ratio_table().as_bytes());
    let mismatches = report.checksum_mismatches();
    for m in &mismatches {
        let _ = writeln!(
            err,
            "checksum mismatch: {} {} = {} vs {}",
            m.workload, m.strategy, m.checksum, m.reference
        );
    }
    if mismatches.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match &cli.command {
        Command::Explain(a) => cmd_explain(a, out, err),
        Command::Check(a) => cmd_check(a, out, err),
        Command::Bench(a) => cmd_bench(a, out, err),
    }
}
