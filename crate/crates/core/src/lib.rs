//! Lowers dense linear algebra statements such as `X = A + B + C` into
//! ordered plans of BLAS-style kernel calls, runs them, and checks them
//! against a single-loop elementwise evaluator.
//!
//! ```
//! use kernelplan::{lower, parse_statement, render_plan, Workspace};
//!
//! let mut ws = Workspace::new();
//! for name in ["X", "A", "B", "C"] {
//!     ws.bind_vector(name, vec![1.0; 4]).unwrap();
//! }
//! let stmt = parse_statement("X = A + B + C", &ws).unwrap();
//! let plan = lower(&stmt, &ws).unwrap();
//! assert_eq!(
//!     render_plan(&plan),
//!     "COPY dst=X src=A\n\
//!      AXPY dst=X sign=+ alpha=1 src=B\n\
//!      AXPY dst=X sign=+ alpha=1 src=C\n"
//! );
//! kernelplan::exec_plan(&plan, &mut ws).unwrap();
//! assert_eq!(ws.vector("X"), Some(&[3.0; 4][..]));
//! ```

pub mod bench;
pub mod check;
pub mod cli;
pub mod expr;
pub mod kernels;
pub mod lower;
pub mod oracle;
pub mod parser;

pub use expr::{
    build_add, build_func, build_matvec, build_scalmul, build_sub, combine_signs, shape_of, BinOp,
    Expr, ExprError, FuncId, Scalar, Shape, Sign,
};
pub use kernels::{exec_plan, exec_plan_with, Backend, KernelError, Matrix, Reference, Workspace};
pub use lower::{
    alias_guard, lower, render_plan, specialize, AssignMode, Instruction, KernelPlan, Statement,
    TempId, Update, VecRef,
};
pub use oracle::{eval_at, eval_stmt};
pub use parser::{parse, parse_statement, tokenize};
