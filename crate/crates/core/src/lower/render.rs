//! Text and JSON renderings of kernel plans.
//!
//! The text form prints one instruction per line:
//!
//! ```text
//! ALLOC tmp=%t0 len=1000
//! SCALEDCOPY dst=%t0 alpha=c2 src=u2
//! AXPY dst=%t0 sign=+ alpha=1 src=u3
//! MAP dst=y mode=acc- func=cos src=%t0
//! FREE tmp=%t0
//! ```

use std::fmt;

use super::{Instruction, KernelPlan};

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Copy { dst, src } => write!(f, "COPY dst={dst} src={src}"),
            Instruction::ScaledCopy { dst, alpha, src } => {
                write!(f, "SCALEDCOPY dst={dst} alpha={alpha} src={src}")
            }
            Instruction::Axpy {
                dst,
                sign,
                alpha,
                src,
            } => write!(f, "AXPY dst={dst} sign={sign} alpha={alpha} src={src}"),
            Instruction::Scal { dst, alpha } => write!(f, "SCAL dst={dst} alpha={alpha}"),
            Instruction::Gemv {
                dst,
                mode,
                alpha,
                mat,
                src,
            } => write!(
                f,
                "GEMV dst={dst} mode={mode} alpha={alpha} mat={mat} src={src}"
            ),
            Instruction::Map {
                dst,
                mode,
                func,
                src,
            } => write!(f, "MAP dst={dst} mode={mode} func={func} src={src}"),
            Instruction::VAdd { dst, a, b } => write!(f, "VADD dst={dst} a={a} b={b}"),
            Instruction::AllocTemp { id, len } => write!(f, "ALLOC tmp={id} len={len}"),
            Instruction::FreeTemp { id } => write!(f, "FREE tmp={id}"),
        }
    }
}

/// One instruction per line, each terminated by a newline.
pub fn render_plan(plan: &KernelPlan) -> String {
    plan.instrs.iter().map(|i| format!("{i}\n")).collect()
}

impl fmt::Display for KernelPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_plan(self))
    }
}

/// Structured form with stable field names, one record per instruction.
pub fn plan_to_json(plan: &KernelPlan) -> String {
    serde_json::to_string_pretty(plan).expect("plans always serialize")
}

pub fn plan_from_json(s: &str) -> serde_json::Result<KernelPlan> {
    serde_json::from_str(s)
}
