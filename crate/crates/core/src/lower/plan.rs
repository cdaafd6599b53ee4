use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{FuncId, Scalar, Sign};

/// Identifier of a scratch vector owned by a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TempId(pub u32);

impl fmt::Display for TempId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "%t{}", self.0)
    }
}

/// A vector operand: a workspace name or a plan temporary. Temporaries render
/// as `%tN`, which can never collide with an identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum VecRef {
    Named(String),
    Temp(TempId),
}

impl VecRef {
    pub fn named(name: impl Into<String>) -> VecRef {
        VecRef::Named(name.into())
    }

    pub fn as_temp(&self) -> Option<TempId> {
        match self {
            VecRef::Temp(t) => Some(*t),
            VecRef::Named(_) => None,
        }
    }
}

impl fmt::Display for VecRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VecRef::Named(n) => f.write_str(n),
            VecRef::Temp(t) => write!(f, "{t}"),
        }
    }
}

impl From<VecRef> for String {
    fn from(r: VecRef) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for VecRef {
    type Error = String;

    fn try_from(s: String) -> Result<VecRef, String> {
        match s.strip_prefix("%t") {
            Some(n) => n
                .parse()
                .map(|n| VecRef::Temp(TempId(n)))
                .map_err(|_| format!("bad temporary reference `{s}`")),
            None if s.is_empty() => Err("empty vector reference".to_string()),
            None => Ok(VecRef::Named(s)),
        }
    }
}

impl From<&str> for VecRef {
    fn from(s: &str) -> VecRef {
        VecRef::Named(s.to_string())
    }
}

impl From<TempId> for VecRef {
    fn from(t: TempId) -> VecRef {
        VecRef::Temp(t)
    }
}

/// How a gemv or map result lands in its destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Update {
    Assign,
    Accumulate(Sign),
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Update::Assign => f.write_str("assign"),
            Update::Accumulate(s) => write!(f, "acc{s}"),
        }
    }
}

impl From<Update> for String {
    fn from(u: Update) -> String {
        u.to_string()
    }
}

impl TryFrom<String> for Update {
    type Error = String;

    fn try_from(s: String) -> Result<Update, String> {
        match s.as_str() {
            "assign" => Ok(Update::Assign),
            "acc+" => Ok(Update::Accumulate(Sign::Plus)),
            "acc-" => Ok(Update::Accumulate(Sign::Minus)),
            _ => Err(format!("bad update mode `{s}`")),
        }
    }
}

/// One kernel call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Instruction {
    /// `dst := src`
    Copy {
        dst: VecRef,
        src: VecRef,
    },
    /// `dst := alpha * src`
    ScaledCopy {
        dst: VecRef,
        alpha: Scalar,
        src: VecRef,
    },
    /// `dst := dst ± alpha * src`
    Axpy {
        dst: VecRef,
        sign: Sign,
        alpha: Scalar,
        src: VecRef,
    },
    /// `dst := alpha * dst`
    Scal {
        dst: VecRef,
        alpha: Scalar,
    },
    Gemv {
        dst: VecRef,
        mode: Update,
        alpha: Scalar,
        mat: String,
        src: VecRef,
    },
    Map {
        dst: VecRef,
        mode: Update,
        func: FuncId,
        src: VecRef,
    },
    /// Fused `dst := a + b`.
    VAdd {
        dst: VecRef,
        a: VecRef,
        b: VecRef,
    },
    AllocTemp {
        id: TempId,
        len: usize,
    },
    FreeTemp {
        id: TempId,
    },
}

impl Instruction {
    /// The vector written by this instruction, if any.
    pub fn dst(&self) -> Option<&VecRef> {
        match self {
            Instruction::Copy { dst, .. }
            | Instruction::ScaledCopy { dst, .. }
            | Instruction::Axpy { dst, .. }
            | Instruction::Scal { dst, .. }
            | Instruction::Gemv { dst, .. }
            | Instruction::Map { dst, .. }
            | Instruction::VAdd { dst, .. } => Some(dst),
            Instruction::AllocTemp { .. } | Instruction::FreeTemp { .. } => None,
        }
    }

    /// Vectors read by this instruction, including the destination when the
    /// update depends on its previous value.
    pub fn reads(&self) -> Vec<&VecRef> {
        match self {
            Instruction::Copy { src, .. } | Instruction::ScaledCopy { src, .. } => vec![src],
            Instruction::Axpy { dst, src, .. } => vec![dst, src],
            Instruction::Scal { dst, .. } => vec![dst],
            Instruction::Gemv { dst, mode, src, .. } | Instruction::Map { dst, mode, src, .. } => {
                match mode {
                    Update::Assign => vec![src],
                    Update::Accumulate(_) => vec![dst, src],
                }
            }
            Instruction::VAdd { a, b, .. } => vec![a, b],
            Instruction::AllocTemp { .. } | Instruction::FreeTemp { .. } => vec![],
        }
    }

    /// Source operands other than the destination's own previous value.
    pub fn sources(&self) -> Vec<&VecRef> {
        match self {
            Instruction::Copy { src, .. }
            | Instruction::ScaledCopy { src, .. }
            | Instruction::Axpy { src, .. }
            | Instruction::Gemv { src, .. }
            | Instruction::Map { src, .. } => vec![src],
            Instruction::VAdd { a, b, .. } => vec![a, b],
            Instruction::Scal { .. }
            | Instruction::AllocTemp { .. }
            | Instruction::FreeTemp { .. } => vec![],
        }
    }

    pub fn is_kernel(&self) -> bool {
        self.dst().is_some()
    }
}

/// Ordered kernel calls for one statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelPlan {
    pub instrs: Vec<Instruction>,
    pub temps: BTreeMap<TempId, usize>,
    pub dst: VecRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_stmt: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("instruction {index}: temporary {id} used before allocation")]
    UseBeforeAlloc { index: usize, id: TempId },
    #[error("instruction {index}: temporary {id} read before it was written")]
    ReadUnwritten { index: usize, id: TempId },
    #[error("instruction {index}: temporary {id} allocated twice")]
    DoubleAlloc { index: usize, id: TempId },
    #[error("instruction {index}: temporary {id} freed without a live allocation")]
    BadFree { index: usize, id: TempId },
    #[error("temporary {0} is never freed")]
    Leaked(TempId),
    #[error("temporary {id} has length {len} in the plan but {table:?} in its table")]
    TableMismatch {
        id: TempId,
        len: usize,
        table: Option<usize>,
    },
}

impl KernelPlan {
    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn count(&self, pred: impl Fn(&Instruction) -> bool) -> usize {
        self.instrs.iter().filter(|i| pred(i)).count()
    }

    pub fn temp_count(&self) -> usize {
        self.count(|i| matches!(i, Instruction::AllocTemp { .. }))
    }

    /// Checks temporary discipline: each temporary is allocated once, written
    /// before it is read, and freed exactly once after its last use.
    pub fn validate(&self) -> Result<(), PlanError> {
        let mut live: HashSet<TempId> = HashSet::new();
        let mut written: HashSet<TempId> = HashSet::new();
        let mut seen: HashSet<TempId> = HashSet::new();
        for (index, instr) in self.instrs.iter().enumerate() {
            match instr {
                Instruction::AllocTemp { id, len } => {
                    if !seen.insert(*id) {
                        return Err(PlanError::DoubleAlloc { index, id: *id });
                    }
                    let table = self.temps.get(id).copied();
                    if table != Some(*len) {
                        return Err(PlanError::TableMismatch {
                            id: *id,
                            len: *len,
                            table,
                        });
                    }
                    live.insert(*id);
                }
                Instruction::FreeTemp { id } => {
                    if !live.remove(id) {
                        return Err(PlanError::BadFree { index, id: *id });
                    }
                }
                _ => {
                    for r in instr.reads() {
                        if let Some(id) = r.as_temp() {
                            if !live.contains(&id) {
                                return Err(PlanError::UseBeforeAlloc { index, id });
                            }
                            if !written.contains(&id) {
                                return Err(PlanError::ReadUnwritten { index, id });
                            }
                        }
                    }
                    if let Some(id) = instr.dst().and_then(VecRef::as_temp) {
                        if !live.contains(&id) {
                            return Err(PlanError::UseBeforeAlloc { index, id });
                        }
                        written.insert(id);
                    }
                }
            }
        }
        match live.into_iter().min() {
            Some(id) => Err(PlanError::Leaked(id)),
            None => Ok(()),
        }
    }
}
