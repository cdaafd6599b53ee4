//! Reference BLAS-shaped vector kernels.
//!
//! All kernels run a single forward loop so results are reproducible to the
//! bit; `k_gemv` sums each row left to right over the columns.

use super::{KernelError, Matrix};
use crate::expr::{FuncId, Sign};
use crate::lower::Update;

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), KernelError> {
    if expected == found {
        Ok(())
    } else {
        Err(KernelError::LengthMismatch {
            kernel: what,
            expected,
            found,
        })
    }
}

/// `dst := src`
pub fn k_copy(dst: &mut [f64], src: &[f64]) -> Result<(), KernelError> {
    check_len("copy", dst.len(), src.len())?;
    dst.copy_from_slice(src);
    Ok(())
}

/// `dst := alpha * src`
pub fn k_scaledcopy(dst: &mut [f64], alpha: f64, src: &[f64]) -> Result<(), KernelError> {
    check_len("scaledcopy", dst.len(), src.len())?;
    for (d, s) in dst.iter_mut().zip(src) {
        *d = alpha * s;
    }
    Ok(())
}

/// `dst := dst ± alpha * src`
pub fn k_axpy(dst: &mut [f64], sign: Sign, alpha: f64, src: &[f64]) -> Result<(), KernelError> {
    check_len("axpy", dst.len(), src.len())?;
    match sign {
        Sign::Plus => {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += alpha * s;
            }
        }
        Sign::Minus => {
            for (d, s) in dst.iter_mut().zip(src) {
                *d -= alpha * s;
            }
        }
    }
    Ok(())
}

/// `dst := alpha * dst`
pub fn k_scal(dst: &mut [f64], alpha: f64) -> Result<(), KernelError> {
    for d in dst.iter_mut() {
        *d *= alpha;
    }
    Ok(())
}

/// `dst := a + b`
pub fn k_vadd(dst: &mut [f64], a: &[f64], b: &[f64]) -> Result<(), KernelError> {
    check_len("vadd", dst.len(), a.len())?;
    check_len("vadd", dst.len(), b.len())?;
    for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
        *d = x + y;
    }
    Ok(())
}

/// Inner product of `row` and `x`, accumulated left to right from zero.
#[inline]
pub fn row_dot(row: &[f64], x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in row.iter().zip(x) {
        acc += a * b;
    }
    acc
}

/// `dst := alpha * M * src` or `dst := dst ± alpha * M * src`.
///
/// `dst` and `src` must not overlap; the executor snapshots aliased operands.
pub fn k_gemv(
    dst: &mut [f64],
    mode: Update,
    alpha: f64,
    mat: &Matrix,
    src: &[f64],
) -> Result<(), KernelError> {
    check_len("gemv", mat.cols(), src.len())?;
    check_len("gemv", mat.rows(), dst.len())?;
    for (i, d) in dst.iter_mut().enumerate() {
        let p = alpha * row_dot(mat.row(i), src);
        *d = match mode {
            Update::Assign => p,
            Update::Accumulate(sign) => sign.apply(*d, p),
        };
    }
    Ok(())
}

/// `dst := f(src)` or `dst := dst ± f(src)` elementwise.
pub fn k_map(dst: &mut [f64], mode: Update, func: FuncId, src: &[f64]) -> Result<(), KernelError> {
    check_len("map", dst.len(), src.len())?;
    // Domain is checked up front so a failing log leaves dst untouched.
    if func == FuncId::Log {
        if let Some((index, &value)) = src
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v <= 0.0)
        {
            return Err(KernelError::Domain { func, index, value });
        }
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        let fx = match func {
            FuncId::Sin => s.sin(),
            FuncId::Cos => s.cos(),
            FuncId::Log => s.ln(),
        };
        *d = match mode {
            Update::Assign => fx,
            Update::Accumulate(sign) => sign.apply(*d, fx),
        };
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axpy_adds_and_subtracts() {
        let mut y = vec![1.0, 1.0];
        k_axpy(&mut y, Sign::Plus, 2.0, &[3.0, 4.0]).unwrap();
        assert_eq!(y, [7.0, 9.0]);
        let mut d = vec![5.0];
        k_axpy(&mut d, Sign::Minus, 1.0, &[2.0]).unwrap();
        assert_eq!(d, [3.0]);
    }

    #[test]
    fn scal_by_zero_annihilates() {
        let mut d = vec![1.5, -2.0, 1e300];
        k_scal(&mut d, 0.0).unwrap();
        assert_eq!(d, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn copy_and_scaledcopy() {
        let mut d = vec![0.0; 3];
        k_copy(&mut d, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d, [1.0, 2.0, 3.0]);
        k_scaledcopy(&mut d, -2.0, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d, [-2.0, -4.0, -6.0]);
    }

    #[test]
    fn gemv_identity_and_row_sums() {
        let mut d = vec![0.0; 2];
        k_gemv(
            &mut d,
            Update::Assign,
            1.0,
            &Matrix::identity(2),
            &[3.0, 4.0],
        )
        .unwrap();
        assert_eq!(d, [3.0, 4.0]);
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        k_gemv(&mut d, Update::Assign, 1.0, &m, &[1.0, 1.0]).unwrap();
        assert_eq!(d, [3.0, 7.0]);
        k_gemv(
            &mut d,
            Update::Accumulate(Sign::Minus),
            2.0,
            &m,
            &[1.0, 0.0],
        )
        .unwrap();
        assert_eq!(d, [1.0, 1.0]);
    }

    #[test]
    fn gemv_rejects_bad_shapes() {
        let m = Matrix::zeros(3, 2);
        let mut d = vec![0.0; 3];
        assert!(k_gemv(&mut d, Update::Assign, 1.0, &m, &[1.0; 3]).is_err());
        let mut d = vec![0.0; 2];
        assert!(k_gemv(&mut d, Update::Assign, 1.0, &m, &[1.0; 2]).is_err());
    }

    #[test]
    fn map_cases() {
        let mut d = vec![9.0];
        k_map(&mut d, Update::Assign, FuncId::Sin, &[0.0]).unwrap();
        assert_eq!(d, [0.0]);
        k_map(&mut d, Update::Assign, FuncId::Log, &[1.0]).unwrap();
        assert_eq!(d, [0.0]);
        let mut d = vec![5.0];
        k_map(&mut d, Update::Accumulate(Sign::Minus), FuncId::Cos, &[0.0]).unwrap();
        assert_eq!(d, [4.0]);
    }

    #[test]
    fn log_domain_error_names_index_and_value() {
        let mut d = vec![7.0; 3];
        let err = k_map(&mut d, Update::Assign, FuncId::Log, &[1.0, 2.0, -0.5]).unwrap_err();
        assert_eq!(
            err,
            KernelError::Domain {
                func: FuncId::Log,
                index: 2,
                value: -0.5
            }
        );
        assert_eq!(d, [7.0; 3]);
        assert!(k_map(&mut d, Update::Assign, FuncId::Log, &[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn length_mismatch() {
        let mut d = vec![0.0; 2];
        assert_eq!(
            k_axpy(&mut d, Sign::Plus, 1.0, &[1.0]),
            Err(KernelError::LengthMismatch {
                kernel: "axpy",
                expected: 2,
                found: 1
            })
        );
        assert!(k_copy(&mut d, &[1.0; 3]).is_err());
        assert!(k_vadd(&mut d, &[1.0; 2], &[1.0]).is_err());
        assert!(k_map(&mut d, Update::Assign, FuncId::Sin, &[1.0]).is_err());
    }
}
