//! Reference backend: BLAS-shaped kernels, the [`Workspace`] they operate
//! on, and the plan interpreter.

mod blas;
mod exec;
mod workspace;

use thiserror::Error;

use crate::expr::{FuncId, Sign};
use crate::lower::{TempId, Update};

pub use blas::{k_axpy, k_copy, k_gemv, k_map, k_scal, k_scaledcopy, k_vadd, row_dot};
pub use exec::{exec_plan, exec_plan_with, ExecState};
pub use workspace::{Matrix, Workspace, WorkspaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("{kernel}: length mismatch, expected {expected} but found {found}")]
    LengthMismatch {
        kernel: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{func} domain error at index {index}: {value}")]
    Domain {
        func: FuncId,
        index: usize,
        value: f64,
    },
    #[error("unbound vector `{0}`")]
    UnboundVector(String),
    #[error("unbound matrix `{0}`")]
    UnboundMatrix(String),
    #[error("unbound scalar `{0}`")]
    UnboundScalar(String),
    #[error("temporary {0} is not allocated")]
    DeadTemp(TempId),
    #[error("temporary {0} is already allocated")]
    LiveTemp(TempId),
    #[error("temporary {0} has zero length")]
    EmptyTemp(TempId),
}

/// The kernel surface a plan is executed against.
///
/// [`Reference`] is the portable implementation; an accelerated backend can
/// be dropped in by implementing this trait. Implementations may assume
/// `dst` never overlaps a source slice.
pub trait Backend {
    fn copy(&self, dst: &mut [f64], src: &[f64]) -> Result<(), KernelError>;
    fn scaled_copy(&self, dst: &mut [f64], alpha: f64, src: &[f64]) -> Result<(), KernelError>;
    fn axpy(&self, dst: &mut [f64], sign: Sign, alpha: f64, src: &[f64])
        -> Result<(), KernelError>;
    fn scal(&self, dst: &mut [f64], alpha: f64) -> Result<(), KernelError>;
    fn gemv(
        &self,
        dst: &mut [f64],
        mode: Update,
        alpha: f64,
        mat: &Matrix,
        src: &[f64],
    ) -> Result<(), KernelError>;
    fn map(
        &self,
        dst: &mut [f64],
        mode: Update,
        func: FuncId,
        src: &[f64],
    ) -> Result<(), KernelError>;
    fn vadd(&self, dst: &mut [f64], a: &[f64], b: &[f64]) -> Result<(), KernelError>;
}

/// Sequential single-loop kernels.
#[derive(Debug, Clone, Copy, Default)]
pub struct Reference;

impl Backend for Reference {
    fn copy(&self, dst: &mut [f64], src: &[f64]) -> Result<(), KernelError> {
        k_copy(dst, src)
    }

    fn scaled_copy(&self, dst: &mut [f64], alpha: f64, src: &[f64]) -> Result<(), KernelError> {
        k_scaledcopy(dst, alpha, src)
    }

    fn axpy(
        &self,
        dst: &mut [f64],
        sign: Sign,
        alpha: f64,
        src: &[f64],
    ) -> Result<(), KernelError> {
        k_axpy(dst, sign, alpha, src)
    }

    fn scal(&self, dst: &mut [f64], alpha: f64) -> Result<(), KernelError> {
        k_scal(dst, alpha)
    }

    fn gemv(
        &self,
        dst: &mut [f64],
        mode: Update,
        alpha: f64,
        mat: &Matrix,
        src: &[f64],
    ) -> Result<(), KernelError> {
        k_gemv(dst, mode, alpha, mat, src)
    }

    fn map(
        &self,
        dst: &mut [f64],
        mode: Update,
        func: FuncId,
        src: &[f64],
    ) -> Result<(), KernelError> {
        k_map(dst, mode, func, src)
    }

    fn vadd(&self, dst: &mut [f64], a: &[f64], b: &[f64]) -> Result<(), KernelError> {
        k_vadd(dst, a, b)
    }
}
