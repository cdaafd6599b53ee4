//! Single-loop elementwise evaluator.
//!
//! Each destination component is computed on its own by recursing through
//! the tree, the way an indexing-operator expression template evaluates
//! `X[i] = A[i] + B[i] + C[i]`. It shares no code with the lowering or the
//! kernels and serves as their correctness reference. Speed is not a goal:
//! a matrix-vector node recomputes a whole row inner product per component.

use thiserror::Error;

use crate::expr::{shape_of, BinOp, Expr, ExprError, FuncId, Scalar, Shape};
use crate::kernels::{Matrix, Workspace};
use crate::lower::{AssignMode, Statement};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{func} domain error at index {index}: {value}")]
    Domain {
        func: FuncId,
        index: usize,
        value: f64,
    },
    #[error("destination `{0}` is not a bound vector")]
    BadDestination(String),
    #[error("cannot assign {rhs} to `{dst}` of length {len}")]
    ShapeMismatch { dst: String, len: usize, rhs: Shape },
}

/// Expression with every name resolved to its storage.
enum Bound<'a> {
    Vector(&'a [f64]),
    Add(Box<Bound<'a>>, Box<Bound<'a>>),
    Sub(Box<Bound<'a>>, Box<Bound<'a>>),
    Scale(f64, Box<Bound<'a>>),
    MatVec(&'a Matrix, Box<Bound<'a>>),
    Func(FuncId, Box<Bound<'a>>),
}

fn scalar_value(s: &Scalar, env: &Workspace) -> Result<f64, OracleError> {
    match s {
        Scalar::Literal(v) => Ok(*v),
        Scalar::Named(n) => env
            .scalar(n)
            .ok_or_else(|| ExprError::Unbound(n.clone()).into()),
    }
}

fn bind<'a>(e: &Expr, env: &'a Workspace) -> Result<Bound<'a>, OracleError> {
    let unbound = |n: &String| OracleError::from(ExprError::Unbound(n.clone()));
    Ok(match e {
        Expr::Vector(n) => Bound::Vector(env.vector(n).ok_or_else(|| unbound(n))?),
        Expr::Binary { op, left, right } => match op {
            BinOp::Add => Bound::Add(Box::new(bind(left, env)?), Box::new(bind(right, env)?)),
            BinOp::Sub => Bound::Sub(Box::new(bind(left, env)?), Box::new(bind(right, env)?)),
            BinOp::ScalMul => {
                let Expr::Scalar(s) = left.as_ref() else {
                    return Err(not_vector(left, env));
                };
                Bound::Scale(scalar_value(s, env)?, Box::new(bind(right, env)?))
            }
            BinOp::MatVec => {
                let Expr::Matrix(m) = left.as_ref() else {
                    return Err(not_vector(left, env));
                };
                let m = env.matrix(m).ok_or_else(|| unbound(m))?;
                Bound::MatVec(m, Box::new(bind(right, env)?))
            }
        },
        Expr::Func { func, arg } => Bound::Func(*func, Box::new(bind(arg, env)?)),
        Expr::Scalar(_) | Expr::Matrix(_) => return Err(not_vector(e, env)),
    })
}

fn not_vector(e: &Expr, env: &Workspace) -> OracleError {
    match shape_of(e, env) {
        Ok(found) => ExprError::NotVector {
            node: e.to_string(),
            found,
        }
        .into(),
        Err(err) => err.into(),
    }
}

impl Bound<'_> {
    fn at(&self, i: usize) -> Result<f64, OracleError> {
        Ok(match self {
            Bound::Vector(v) => v[i],
            Bound::Add(l, r) => l.at(i)? + r.at(i)?,
            Bound::Sub(l, r) => l.at(i)? - r.at(i)?,
            Bound::Scale(c, v) => c * v.at(i)?,
            Bound::MatVec(m, v) => {
                let row = m.row(i);
                let mut acc = 0.0;
                for (j, a) in row.iter().enumerate() {
                    acc += a * v.at(j)?;
                }
                acc
            }
            Bound::Func(f, arg) => {
                let x = arg.at(i)?;
                f.eval(x).ok_or(OracleError::Domain {
                    func: *f,
                    index: i,
                    value: x,
                })?
            }
        })
    }
}

fn vector_len(e: &Expr, env: &Workspace) -> Result<usize, OracleError> {
    match shape_of(e, env)? {
        Shape::Vector(n) => Ok(n),
        found => Err(ExprError::NotVector {
            node: e.to_string(),
            found,
        }
        .into()),
    }
}

/// The `i`-th component of `e`.
pub fn eval_at(e: &Expr, i: usize, env: &Workspace) -> Result<f64, OracleError> {
    let len = vector_len(e, env)?;
    if i >= len {
        return Err(OracleError::IndexOutOfRange { index: i, len });
    }
    bind(e, env)?.at(i)
}

/// Evaluates every component of `e` in one loop.
pub fn eval_expr(e: &Expr, env: &Workspace) -> Result<Vec<f64>, OracleError> {
    let len = vector_len(e, env)?;
    let bound = bind(e, env)?;
    (0..len).map(|i| bound.at(i)).collect()
}

/// Executes a statement with single-loop semantics. The right-hand side is
/// evaluated completely against the old destination before any component
/// is written, so a destination that also appears on the right reads its
/// previous value everywhere.
pub fn eval_stmt(stmt: &Statement, env: &mut Workspace) -> Result<(), OracleError> {
    let len = env
        .vector(&stmt.dst)
        .map(<[f64]>::len)
        .ok_or_else(|| OracleError::BadDestination(stmt.dst.clone()))?;
    let rhs = shape_of(&stmt.rhs, env)?;
    if rhs != Shape::Vector(len) {
        return Err(OracleError::ShapeMismatch {
            dst: stmt.dst.clone(),
            len,
            rhs,
        });
    }
    let values = eval_expr(&stmt.rhs, env)?;
    let dst = env.vector_mut(&stmt.dst).expect("checked above");
    for (d, v) in dst.iter_mut().zip(values) {
        *d = match stmt.mode {
            AssignMode::Assign => v,
            AssignMode::PlusAssign => *d + v,
            AssignMode::MinusAssign => *d - v,
        };
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{build_add, build_func, build_matvec, build_scalmul, build_sub};

    fn v(n: &str) -> Expr {
        Expr::vector(n)
    }

    fn ws(vectors: &[(&str, &[f64])]) -> Workspace {
        let mut ws = Workspace::new();
        for (n, d) in vectors {
            ws.bind_vector(*n, d.to_vec()).unwrap();
        }
        ws
    }

    #[test]
    fn componentwise_sum() {
        let env = ws(&[
            ("A", &[1.0, 2.0]),
            ("B", &[10.0, 20.0]),
            ("C", &[100.0, 200.0]),
        ]);
        let e = build_add(build_add(v("A"), v("B")).unwrap(), v("C")).unwrap();
        assert_eq!(eval_at(&e, 0, &env), Ok(111.0));
        assert_eq!(eval_at(&e, 1, &env), Ok(222.0));
        assert_eq!(
            eval_at(&e, 2, &env),
            Err(OracleError::IndexOutOfRange { index: 2, len: 2 })
        );
    }

    #[test]
    fn scalar_multiply_and_functions() {
        let mut env = ws(&[("u", &[1.5, -2.0]), ("A", &[0.0]), ("B", &[0.0])]);
        env.bind_scalar("c", 3.0).unwrap();
        let e = build_scalmul(Expr::scalar("c"), v("u")).unwrap();
        assert_eq!(eval_at(&e, 1, &env), Ok(-6.0));
        let e = build_func(FuncId::Sin, build_add(v("A"), v("B")).unwrap()).unwrap();
        assert_eq!(eval_at(&e, 0, &env), Ok(0.0));
        let e = build_func(FuncId::Log, v("u")).unwrap();
        assert_eq!(
            eval_at(&e, 1, &env),
            Err(OracleError::Domain {
                func: FuncId::Log,
                index: 1,
                value: -2.0
            })
        );
    }

    #[test]
    fn matvec_row_inner_product() {
        let mut env = ws(&[("y", &[1.0, 1.0])]);
        env.bind_matrix("M", Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap())
            .unwrap();
        let e = build_matvec(Expr::matrix("M"), v("y")).unwrap();
        assert_eq!(eval_expr(&e, &env), Ok(vec![3.0, 7.0]));
    }

    #[test]
    fn statements() {
        let mut env = ws(&[("X", &[0.0]), ("A", &[1.0]), ("B", &[2.0]), ("C", &[3.0])]);
        let s = Statement::assign(
            "X",
            build_add(build_add(v("A"), v("B")).unwrap(), v("C")).unwrap(),
        );
        eval_stmt(&s, &mut env).unwrap();
        assert_eq!(env.vector("X"), Some(&[6.0][..]));

        let mut env = ws(&[("y", &[1.0]), ("x", &[3.0])]);
        env.bind_scalar("c", 2.0).unwrap();
        let s = Statement::assign(
            "y",
            build_add(v("y"), build_scalmul(Expr::scalar("c"), v("x")).unwrap()).unwrap(),
        );
        eval_stmt(&s, &mut env).unwrap();
        assert_eq!(env.vector("y"), Some(&[7.0][..]));

        let mut env = ws(&[("X", &[10.0]), ("A", &[1.0]), ("B", &[4.0])]);
        let s = Statement::new(
            "X",
            AssignMode::PlusAssign,
            build_sub(v("A"), v("B")).unwrap(),
        );
        eval_stmt(&s, &mut env).unwrap();
        assert_eq!(env.vector("X"), Some(&[7.0][..]));
    }

    #[test]
    fn aliased_destination_reads_snapshot() {
        let mut env = ws(&[("y", &[1.0, 2.0])]);
        env.bind_matrix("P", Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap())
            .unwrap();
        let s = Statement::assign("y", build_matvec(Expr::matrix("P"), v("y")).unwrap());
        eval_stmt(&s, &mut env).unwrap();
        assert_eq!(env.vector("y"), Some(&[2.0, 1.0][..]));
    }

    #[test]
    fn errors() {
        let mut env = ws(&[("X", &[0.0; 2]), ("A", &[1.0; 3])]);
        let s = Statement::assign("X", v("A"));
        assert!(matches!(
            eval_stmt(&s, &mut env),
            Err(OracleError::ShapeMismatch { .. })
        ));
        let s = Statement::assign("Z", v("A"));
        assert_eq!(
            eval_stmt(&s, &mut env),
            Err(OracleError::BadDestination("Z".into()))
        );
        let s = Statement::assign("X", v("Q"));
        assert_eq!(
            eval_stmt(&s, &mut env),
            Err(OracleError::Expr(ExprError::Unbound("Q".into())))
        );
    }
}
