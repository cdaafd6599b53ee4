use std::fmt;

use serde::{Deserialize, Serialize};

use super::{BinOp, Expr, ExprError};
use crate::kernels::Workspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Scalar,
    Vector(usize),
    Matrix { rows: usize, cols: usize },
}

impl Shape {
    pub fn vector_len(self) -> Option<usize> {
        match self {
            Shape::Vector(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Scalar => f.write_str("scalar"),
            Shape::Vector(n) => write!(f, "vector({n})"),
            Shape::Matrix { rows, cols } => write!(f, "matrix({rows}x{cols})"),
        }
    }
}

/// Infers the shape of `e` against the names bound in `env`.
pub fn shape_of(e: &Expr, env: &Workspace) -> Result<Shape, ExprError> {
    match e {
        Expr::Vector(name) => env
            .vector(name)
            .map(|v| Shape::Vector(v.len()))
            .ok_or_else(|| ExprError::Unbound(name.clone())),
        Expr::Matrix(name) => env
            .matrix(name)
            .map(|m| Shape::Matrix {
                rows: m.rows(),
                cols: m.cols(),
            })
            .ok_or_else(|| ExprError::Unbound(name.clone())),
        Expr::Scalar(super::Scalar::Literal(_)) => Ok(Shape::Scalar),
        Expr::Scalar(super::Scalar::Named(name)) => env
            .scalar(name)
            .map(|_| Shape::Scalar)
            .ok_or_else(|| ExprError::Unbound(name.clone())),
        Expr::Binary { op, left, right } => {
            let l = shape_of(left, env)?;
            let r = shape_of(right, env)?;
            let mismatch = || ExprError::Shape {
                node: e.to_string(),
                left: l,
                right: r,
            };
            match (op, l, r) {
                (BinOp::Add | BinOp::Sub, Shape::Vector(a), Shape::Vector(b)) if a == b => {
                    Ok(Shape::Vector(a))
                }
                (BinOp::ScalMul, Shape::Scalar, Shape::Vector(n)) => Ok(Shape::Vector(n)),
                (BinOp::MatVec, Shape::Matrix { rows, cols }, Shape::Vector(n)) if cols == n => {
                    Ok(Shape::Vector(rows))
                }
                _ => Err(mismatch()),
            }
        }
        Expr::Func { arg, .. } => match shape_of(arg, env)? {
            s @ Shape::Vector(_) => Ok(s),
            found => Err(ExprError::NotVector {
                node: arg.to_string(),
                found,
            }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{build_add, build_func, build_matvec, build_scalmul, FuncId};
    use crate::kernels::{Matrix, Workspace};

    fn env() -> Workspace {
        let mut ws = Workspace::new();
        ws.bind_vector("A", vec![0.0; 4]).unwrap();
        ws.bind_vector("B", vec![0.0; 4]).unwrap();
        ws.bind_vector("C", vec![0.0; 5]).unwrap();
        ws.bind_vector("y", vec![0.0; 5]).unwrap();
        ws.bind_matrix("M", Matrix::zeros(3, 5)).unwrap();
        ws.bind_scalar("c", 2.0).unwrap();
        ws
    }

    #[test]
    fn equal_lengths_add() {
        let e = build_add(Expr::vector("A"), Expr::vector("B")).unwrap();
        assert_eq!(shape_of(&e, &env()), Ok(Shape::Vector(4)));
    }

    #[test]
    fn matvec_rule() {
        let e = build_matvec(Expr::matrix("M"), Expr::vector("y")).unwrap();
        assert_eq!(shape_of(&e, &env()), Ok(Shape::Vector(3)));
        let e = build_scalmul(Expr::scalar("c"), e).unwrap();
        assert_eq!(shape_of(&e, &env()), Ok(Shape::Vector(3)));
        let e = build_func(FuncId::Cos, e).unwrap();
        assert_eq!(shape_of(&e, &env()), Ok(Shape::Vector(3)));
    }

    #[test]
    fn mismatch_names_both_shapes() {
        let e = build_add(Expr::vector("A"), Expr::vector("C")).unwrap();
        let err = shape_of(&e, &env()).unwrap_err();
        assert_eq!(
            err,
            ExprError::Shape {
                node: "(A + C)".into(),
                left: Shape::Vector(4),
                right: Shape::Vector(5),
            }
        );
        let msg = err.to_string();
        assert!(
            msg.contains("vector(4)") && msg.contains("vector(5)"),
            "{msg}"
        );

        let e = build_matvec(Expr::matrix("M"), Expr::vector("A")).unwrap();
        assert!(matches!(shape_of(&e, &env()), Err(ExprError::Shape { .. })));
    }

    #[test]
    fn construction_never_resolves_names() {
        let e = build_add(Expr::vector("nope"), Expr::vector("A")).unwrap();
        assert_eq!(shape_of(&e, &env()), Err(ExprError::Unbound("nope".into())));
        let e = build_scalmul(Expr::scalar("k"), Expr::vector("A")).unwrap();
        assert_eq!(shape_of(&e, &env()), Err(ExprError::Unbound("k".into())));
    }
}
