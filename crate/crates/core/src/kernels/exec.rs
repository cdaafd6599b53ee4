use std::collections::HashMap;

use super::{Backend, KernelError, Reference, Workspace};
use crate::expr::Scalar;
use crate::lower::{Instruction, KernelPlan, TempId, VecRef};

/// A workspace plus the temporaries of the plan currently running.
#[derive(Debug)]
pub struct ExecState<'w> {
    pub workspace: &'w mut Workspace,
    pub temps: HashMap<TempId, Vec<f64>>,
}

impl<'w> ExecState<'w> {
    pub fn new(workspace: &'w mut Workspace) -> Self {
        ExecState {
            workspace,
            temps: HashMap::new(),
        }
    }

    pub fn run<B: Backend + ?Sized>(
        &mut self,
        backend: &B,
        instrs: &[Instruction],
    ) -> Result<(), KernelError> {
        instrs.iter().try_for_each(|i| self.step(backend, i))
    }

    pub fn step<B: Backend + ?Sized>(
        &mut self,
        backend: &B,
        instr: &Instruction,
    ) -> Result<(), KernelError> {
        match instr {
            Instruction::AllocTemp { id, len } => {
                if *len == 0 {
                    return Err(KernelError::EmptyTemp(*id));
                }
                if self.temps.contains_key(id) {
                    return Err(KernelError::LiveTemp(*id));
                }
                self.temps.insert(*id, vec![0.0; *len]);
                Ok(())
            }
            Instruction::FreeTemp { id } => self
                .temps
                .remove(id)
                .map(drop)
                .ok_or(KernelError::DeadTemp(*id)),
            _ => {
                let dst = instr.dst().expect("kernel instruction has a destination");
                let mut out = self.take(dst)?;
                // Kernels assume disjoint operands, so a source that is also
                // the destination reads a snapshot of its old value.
                let snapshot = instr.sources().contains(&dst).then(|| out.clone());
                let result = self.apply(backend, instr, &mut out, snapshot.as_deref());
                self.restore(dst, out);
                result
            }
        }
    }

    fn take(&mut self, r: &VecRef) -> Result<Vec<f64>, KernelError> {
        match r {
            VecRef::Named(n) => self
                .workspace
                .take_vector(n)
                .ok_or_else(|| KernelError::UnboundVector(n.clone())),
            VecRef::Temp(t) => self
                .temps
                .get_mut(t)
                .map(std::mem::take)
                .ok_or(KernelError::DeadTemp(*t)),
        }
    }

    fn restore(&mut self, r: &VecRef, data: Vec<f64>) {
        match r {
            VecRef::Named(n) => self.workspace.restore_vector(n, data),
            VecRef::Temp(t) => {
                if let Some(slot) = self.temps.get_mut(t) {
                    *slot = data;
                }
            }
        }
    }

    fn source<'s>(
        &'s self,
        r: &VecRef,
        dst: &VecRef,
        snapshot: Option<&'s [f64]>,
    ) -> Result<&'s [f64], KernelError> {
        if r == dst {
            if let Some(s) = snapshot {
                return Ok(s);
            }
        }
        match r {
            VecRef::Named(n) => self
                .workspace
                .vector(n)
                .ok_or_else(|| KernelError::UnboundVector(n.clone())),
            VecRef::Temp(t) => self
                .temps
                .get(t)
                .map(Vec::as_slice)
                .ok_or(KernelError::DeadTemp(*t)),
        }
    }

    fn scalar(&self, s: &Scalar) -> Result<f64, KernelError> {
        match s {
            Scalar::Literal(v) => Ok(*v),
            Scalar::Named(n) => self
                .workspace
                .scalar(n)
                .ok_or_else(|| KernelError::UnboundScalar(n.clone())),
        }
    }

    fn apply<B: Backend + ?Sized>(
        &self,
        backend: &B,
        instr: &Instruction,
        out: &mut [f64],
        snap: Option<&[f64]>,
    ) -> Result<(), KernelError> {
        match instr {
            Instruction::Copy { dst, src } => backend.copy(out, self.source(src, dst, snap)?),
            Instruction::ScaledCopy { dst, alpha, src } => {
                backend.scaled_copy(out, self.scalar(alpha)?, self.source(src, dst, snap)?)
            }
            Instruction::Axpy {
                dst,
                sign,
                alpha,
                src,
            } => backend.axpy(
                out,
                *sign,
                self.scalar(alpha)?,
                self.source(src, dst, snap)?,
            ),
            Instruction::Scal { alpha, .. } => backend.scal(out, self.scalar(alpha)?),
            Instruction::Gemv {
                dst,
                mode,
                alpha,
                mat,
                src,
            } => {
                let m = self
                    .workspace
                    .matrix(mat)
                    .ok_or_else(|| KernelError::UnboundMatrix(mat.clone()))?;
                backend.gemv(
                    out,
                    *mode,
                    self.scalar(alpha)?,
                    m,
                    self.source(src, dst, snap)?,
                )
            }
            Instruction::Map {
                dst,
                mode,
                func,
                src,
            } => backend.map(out, *mode, *func, self.source(src, dst, snap)?),
            Instruction::VAdd { dst, a, b } => {
                backend.vadd(out, self.source(a, dst, snap)?, self.source(b, dst, snap)?)
            }
            Instruction::AllocTemp { .. } | Instruction::FreeTemp { .. } => {
                unreachable!("temp bookkeeping is handled in step")
            }
        }
    }
}

/// Executes `plan` on `ws` with the [`Reference`] backend.
///
/// Instructions run in order. On error the plan stops: earlier writes to the
/// workspace stay in place, and all temporaries are released either way.
pub fn exec_plan(plan: &KernelPlan, ws: &mut Workspace) -> Result<(), KernelError> {
    exec_plan_with(&Reference, plan, ws)
}

pub fn exec_plan_with<B: Backend + ?Sized>(
    backend: &B,
    plan: &KernelPlan,
    ws: &mut Workspace,
) -> Result<(), KernelError> {
    ExecState::new(ws).run(backend, &plan.instrs)
}
