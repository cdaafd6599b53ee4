//! Lowering of assignment statements into kernel plans.
//!
//! The right-hand side is split into units bounded by `+` and `-` and each
//! unit is applied to the destination in turn. Two mutually recursive walks
//! do the work:
//!
//! * the *assign* walk initializes the destination from the leftmost unit and
//!   hands the remaining right operands to the operate walk;
//! * the *operate* walk folds a subtree into the destination under a running
//!   [`Sign`], combining the sign with each `-` it passes.
//!
//! Leaves become `copy`/`axpy`, scalar and matrix products become
//! `scaledcopy`/`axpy`/`gemv`, and elementwise functions become `map`.
//! Operands that a kernel cannot read directly are first evaluated into a
//! temporary vector.

mod alias;
mod plan;
mod render;
mod specialize;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{shape_of, BinOp, Expr, ExprError, Scalar, Shape, Sign};
use crate::kernels::Workspace;

pub use alias::{alias_guard, AliasStrategy};
pub use plan::{Instruction, KernelPlan, PlanError, TempId, Update, VecRef};
pub use render::{plan_from_json, plan_to_json, render_plan};
pub use specialize::specialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AssignMode {
    Assign,
    PlusAssign,
    MinusAssign,
}

impl AssignMode {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignMode::Assign => "=",
            AssignMode::PlusAssign => "+=",
            AssignMode::MinusAssign => "-=",
        }
    }
}

/// `dst = rhs`, `dst += rhs` or `dst -= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statement {
    pub dst: String,
    pub mode: AssignMode,
    pub rhs: Expr,
}

impl Statement {
    pub fn new(dst: impl Into<String>, mode: AssignMode, rhs: Expr) -> Statement {
        Statement {
            dst: dst.into(),
            mode,
            rhs,
        }
    }

    pub fn assign(dst: impl Into<String>, rhs: Expr) -> Statement {
        Statement::new(dst, AssignMode::Assign, rhs)
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.dst, self.mode.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LowerError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("destination `{0}` is not a bound vector")]
    BadDestination(String),
    #[error("cannot assign {rhs} to `{dst}` of shape {dst_shape}")]
    ShapeMismatch {
        dst: String,
        dst_shape: Shape,
        rhs: Shape,
    },
}

/// Accumulates instructions and temporaries while a statement is lowered.
#[derive(Debug)]
pub struct PlanBuilder<'a> {
    env: &'a Workspace,
    instrs: Vec<Instruction>,
    temps: BTreeMap<TempId, usize>,
    next_temp: u32,
}

impl<'a> PlanBuilder<'a> {
    pub fn new(env: &'a Workspace) -> Self {
        PlanBuilder {
            env,
            instrs: Vec::new(),
            temps: BTreeMap::new(),
            next_temp: 0,
        }
    }

    fn emit(&mut self, instr: Instruction) {
        self.instrs.push(instr);
    }

    fn alloc(&mut self, len: usize) -> TempId {
        let id = TempId(self.next_temp);
        self.next_temp += 1;
        self.temps.insert(id, len);
        self.emit(Instruction::AllocTemp { id, len });
        id
    }

    fn free(&mut self, id: Option<TempId>) {
        if let Some(id) = id {
            self.emit(Instruction::FreeTemp { id });
        }
    }

    fn scalar_of(e: &Expr) -> Scalar {
        match e {
            Expr::Scalar(s) => s.clone(),
            other => unreachable!("scalar operand expected, found {other}"),
        }
    }

    fn matrix_of(e: &Expr) -> String {
        match e {
            Expr::Matrix(m) => m.clone(),
            other => unreachable!("matrix operand expected, found {other}"),
        }
    }

    /// A reference a kernel can read: the leaf itself, or a freshly
    /// materialized temporary which the caller must free after use.
    fn operand(&mut self, e: &Expr) -> Result<(VecRef, Option<TempId>), LowerError> {
        match e {
            Expr::Vector(n) => Ok((VecRef::Named(n.clone()), None)),
            other => {
                let t = self.materialize(other)?;
                Ok((t.into(), Some(t)))
            }
        }
    }

    /// Emits instructions leaving the value of `e` in `dst`.
    pub fn lower_assign(&mut self, e: &Expr, dst: &VecRef) -> Result<(), LowerError> {
        match e {
            Expr::Vector(n) => {
                let src = VecRef::Named(n.clone());
                if &src != dst {
                    self.emit(Instruction::Copy {
                        dst: dst.clone(),
                        src,
                    });
                }
            }
            Expr::Binary { op, left, right } => match op {
                BinOp::Add | BinOp::Sub => {
                    self.lower_assign(left, dst)?;
                    let sign = op.additive_sign().expect("additive op");
                    self.lower_operate(right, dst, sign)?;
                }
                BinOp::ScalMul => {
                    let alpha = Self::scalar_of(left);
                    let (src, temp) = self.operand(right)?;
                    if &src == dst {
                        self.emit(Instruction::Scal {
                            dst: dst.clone(),
                            alpha,
                        });
                    } else {
                        self.emit(Instruction::ScaledCopy {
                            dst: dst.clone(),
                            alpha,
                            src,
                        });
                    }
                    self.free(temp);
                }
                BinOp::MatVec => {
                    let mat = Self::matrix_of(left);
                    let (src, temp) = self.operand(right)?;
                    self.emit(Instruction::Gemv {
                        dst: dst.clone(),
                        mode: Update::Assign,
                        alpha: Scalar::ONE,
                        mat,
                        src,
                    });
                    self.free(temp);
                }
            },
            Expr::Func { func, arg } => {
                let (src, temp) = self.operand(arg)?;
                self.emit(Instruction::Map {
                    dst: dst.clone(),
                    mode: Update::Assign,
                    func: *func,
                    src,
                });
                self.free(temp);
            }
            Expr::Scalar(_) | Expr::Matrix(_) => {
                return Err(ExprError::NotVector {
                    node: e.to_string(),
                    found: shape_of(e, self.env)?,
                }
                .into())
            }
        }
        Ok(())
    }

    /// Emits instructions effecting `dst := dst ± e` for the given sign.
    pub fn lower_operate(&mut self, e: &Expr, dst: &VecRef, sign: Sign) -> Result<(), LowerError> {
        match e {
            Expr::Vector(n) => self.emit(Instruction::Axpy {
                dst: dst.clone(),
                sign,
                alpha: Scalar::ONE,
                src: VecRef::Named(n.clone()),
            }),
            Expr::Binary { op, left, right } => match op {
                BinOp::Add | BinOp::Sub => {
                    self.lower_operate(left, dst, sign)?;
                    let op_sign = op.additive_sign().expect("additive op");
                    self.lower_operate(right, dst, sign.combine(op_sign))?;
                }
                BinOp::ScalMul => {
                    let alpha = Self::scalar_of(left);
                    let (src, temp) = self.operand(right)?;
                    self.emit(Instruction::Axpy {
                        dst: dst.clone(),
                        sign,
                        alpha,
                        src,
                    });
                    self.free(temp);
                }
                BinOp::MatVec => {
                    let mat = Self::matrix_of(left);
                    let (src, temp) = self.operand(right)?;
                    self.emit(Instruction::Gemv {
                        dst: dst.clone(),
                        mode: Update::Accumulate(sign),
                        alpha: Scalar::ONE,
                        mat,
                        src,
                    });
                    self.free(temp);
                }
            },
            Expr::Func { func, arg } => {
                let (src, temp) = self.operand(arg)?;
                self.emit(Instruction::Map {
                    dst: dst.clone(),
                    mode: Update::Accumulate(sign),
                    func: *func,
                    src,
                });
                self.free(temp);
            }
            Expr::Scalar(_) | Expr::Matrix(_) => {
                return Err(ExprError::NotVector {
                    node: e.to_string(),
                    found: shape_of(e, self.env)?,
                }
                .into())
            }
        }
        Ok(())
    }

    /// Allocates a temporary and assigns `e` into it. The caller frees it.
    pub fn materialize(&mut self, e: &Expr) -> Result<TempId, LowerError> {
        let len = match shape_of(e, self.env)? {
            Shape::Vector(n) => n,
            found => {
                return Err(ExprError::NotVector {
                    node: e.to_string(),
                    found,
                }
                .into())
            }
        };
        let t = self.alloc(len);
        self.lower_assign(e, &t.into())?;
        Ok(t)
    }

    pub fn finish(self, dst: VecRef, source_stmt: Option<String>) -> KernelPlan {
        KernelPlan {
            instrs: self.instrs,
            temps: self.temps,
            dst,
            source_stmt,
        }
    }
}

/// Lowers a statement into a kernel plan.
pub fn lower(stmt: &Statement, env: &Workspace) -> Result<KernelPlan, LowerError> {
    let dst_len = env
        .vector(&stmt.dst)
        .map(<[f64]>::len)
        .ok_or_else(|| LowerError::BadDestination(stmt.dst.clone()))?;
    let rhs_shape = shape_of(&stmt.rhs, env)?;
    if rhs_shape != Shape::Vector(dst_len) {
        return Err(LowerError::ShapeMismatch {
            dst: stmt.dst.clone(),
            dst_shape: Shape::Vector(dst_len),
            rhs: rhs_shape,
        });
    }

    let dst = VecRef::Named(stmt.dst.clone());
    let mut b = PlanBuilder::new(env);
    match alias_guard(stmt) {
        AliasStrategy::NoAlias | AliasStrategy::InPlace => match stmt.mode {
            AssignMode::Assign => b.lower_assign(&stmt.rhs, &dst)?,
            AssignMode::PlusAssign => b.lower_operate(&stmt.rhs, &dst, Sign::Plus)?,
            AssignMode::MinusAssign => b.lower_operate(&stmt.rhs, &dst, Sign::Minus)?,
        },
        AliasStrategy::ViaTemp => {
            let t = b.alloc(dst_len);
            b.lower_assign(&stmt.rhs, &t.into())?;
            b.emit(match stmt.mode {
                AssignMode::Assign => Instruction::Copy {
                    dst: dst.clone(),
                    src: t.into(),
                },
                AssignMode::PlusAssign | AssignMode::MinusAssign => Instruction::Axpy {
                    dst: dst.clone(),
                    sign: if stmt.mode == AssignMode::PlusAssign {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    },
                    alpha: Scalar::ONE,
                    src: t.into(),
                },
            });
            b.free(Some(t));
        }
    }
    Ok(b.finish(dst, Some(stmt.to_string())))
}
