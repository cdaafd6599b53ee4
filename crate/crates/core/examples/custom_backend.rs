//! Plugging in a different kernel implementation: this one counts calls and
//! floating-point element updates, then delegates to the reference kernels.

use std::cell::RefCell;
use std::collections::BTreeMap;

use kernelplan::bench::Workload;
use kernelplan::{exec_plan_with, Backend, FuncId, KernelError, Matrix, Reference, Sign, Update};

#[derive(Default)]
struct Counting {
    calls: RefCell<BTreeMap<&'static str, (usize, usize)>>,
}

impl Counting {
    fn note(&self, kernel: &'static str, elements: usize) {
        let mut calls = self.calls.borrow_mut();
        let entry = calls.entry(kernel).or_default();
        entry.0 += 1;
        entry.1 += elements;
    }
}

impl Backend for Counting {
    fn copy(&self, dst: &mut [f64], src: &[f64]) -> Result<(), KernelError> {
        self.note("copy", dst.len());
        Reference.copy(dst, src)
    }

    fn scaled_copy(&self, dst: &mut [f64], alpha: f64, src: &[f64]) -> Result<(), KernelError> {
        self.note("scaledcopy", dst.len());
        Reference.scaled_copy(dst, alpha, src)
    }

    fn axpy(
        &self,
        dst: &mut [f64],
        sign: Sign,
        alpha: f64,
        src: &[f64],
    ) -> Result<(), KernelError> {
        self.note("axpy", dst.len());
        Reference.axpy(dst, sign, alpha, src)
    }

    fn scal(&self, dst: &mut [f64], alpha: f64) -> Result<(), KernelError> {
        self.note("scal", dst.len());
        Reference.scal(dst, alpha)
    }

    fn gemv(
        &self,
        dst: &mut [f64],
        mode: Update,
        alpha: f64,
        mat: &Matrix,
        src: &[f64],
    ) -> Result<(), KernelError> {
        self.note("gemv", mat.rows() * mat.cols());
        Reference.gemv(dst, mode, alpha, mat, src)
    }

    fn map(
        &self,
        dst: &mut [f64],
        mode: Update,
        func: FuncId,
        src: &[f64],
    ) -> Result<(), KernelError> {
        self.note("map", dst.len());
        Reference.map(dst, mode, func, src)
    }

    fn vadd(&self, dst: &mut [f64], a: &[f64], b: &[f64]) -> Result<(), KernelError> {
        self.note("vadd", dst.len());
        Reference.vadd(dst, a, b)
    }
}

fn main() {
    for w in Workload::ALL {
        let mut ws = w.workspace(500, 0);
        let plans = w.plans(&ws).unwrap();
        let backend = Counting::default();
        for plan in &plans {
            exec_plan_with(&backend, plan, &mut ws).unwrap();
        }
        println!("{w}:");
        for (kernel, (calls, elems)) in backend.calls.borrow().iter() {
            println!("  {kernel:<10} {calls:>3} calls {elems:>8} elements");
        }
    }
}
