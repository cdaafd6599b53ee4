//! Expression trees for dense vector statements.
//!
//! An [`Expr`] is the runtime form of a nested binary closure: `A + B + C`
//! becomes `Add(Add(A, B), C)`. Building a tree never touches data; names are
//! resolved only by [`shape_of`], the oracle, or kernel execution.

mod shape;
mod sign;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use shape::{shape_of, Shape};
pub use sign::{combine_signs, Sign};

/// Elementwise real functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FuncId {
    Sin,
    Cos,
    Log,
}

impl FuncId {
    pub const ALL: [FuncId; 3] = [FuncId::Sin, FuncId::Cos, FuncId::Log];

    pub fn name(self) -> &'static str {
        match self {
            FuncId::Sin => "sin",
            FuncId::Cos => "cos",
            FuncId::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<FuncId> {
        match name {
            "sin" => Some(FuncId::Sin),
            "cos" => Some(FuncId::Cos),
            "log" => Some(FuncId::Log),
            _ => None,
        }
    }

    /// Evaluates the function, or `None` outside its domain (`log` of a
    /// non-positive value).
    #[inline]
    pub fn eval(self, x: f64) -> Option<f64> {
        match self {
            FuncId::Sin => Some(x.sin()),
            FuncId::Cos => Some(x.cos()),
            FuncId::Log if x > 0.0 => Some(x.ln()),
            FuncId::Log => None,
        }
    }
}

impl fmt::Display for FuncId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scalar operand: a literal or the name of a workspace scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Literal(f64),
    Named(String),
}

impl Scalar {
    pub const ONE: Scalar = Scalar::Literal(1.0);

    pub fn named(name: impl Into<String>) -> Scalar {
        Scalar::Named(name.into())
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Literal(v)
    }
}

impl From<&str> for Scalar {
    fn from(name: &str) -> Self {
        Scalar::Named(name.to_string())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Literal(v) => write!(f, "{v}"),
            Scalar::Named(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    /// Scalar times vector; the scalar is always the left operand.
    ScalMul,
    /// Matrix times vector; the matrix leaf is always the left operand.
    MatVec,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::ScalMul | BinOp::MatVec => "*",
        }
    }

    /// The additive sign an `Add`/`Sub` node applies to its right operand.
    pub fn additive_sign(self) -> Option<Sign> {
        match self {
            BinOp::Add => Some(Sign::Plus),
            BinOp::Sub => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// Syntactic kind of an expression, known without a workspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    Vector,
    Matrix,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Scalar => "scalar",
            Kind::Vector => "vector",
            Kind::Matrix => "matrix",
        })
    }
}

/// An immutable expression tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Vector(String),
    Matrix(String),
    Scalar(Scalar),
    Binary {
        op: BinOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Func {
        func: FuncId,
        arg: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("`{op}` expects a {expected} operand, but `{operand}` is a {found}")]
    Kind {
        op: &'static str,
        operand: String,
        expected: &'static str,
        found: Kind,
    },
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("shape mismatch in `{node}`: {left} vs {right}")]
    Shape {
        node: String,
        left: Shape,
        right: Shape,
    },
    #[error("`{node}` has shape {found}, expected a vector")]
    NotVector { node: String, found: Shape },
}

impl Expr {
    pub fn vector(name: impl Into<String>) -> Expr {
        Expr::Vector(name.into())
    }

    pub fn matrix(name: impl Into<String>) -> Expr {
        Expr::Matrix(name.into())
    }

    pub fn scalar(s: impl Into<Scalar>) -> Expr {
        Expr::Scalar(s.into())
    }

    pub fn kind(&self) -> Kind {
        match self {
            Expr::Scalar(_) => Kind::Scalar,
            Expr::Matrix(_) => Kind::Matrix,
            _ => Kind::Vector,
        }
    }

    /// True for plain vector names, which kernels can read directly.
    pub fn is_leaf(&self) -> bool {
        matches!(self, Expr::Vector(_))
    }

    pub fn as_vector_name(&self) -> Option<&str> {
        match self {
            Expr::Vector(n) => Some(n),
            _ => None,
        }
    }

    /// Whether the vector `name` is read anywhere in the tree.
    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Expr::Vector(n) => n == name,
            Expr::Matrix(_) | Expr::Scalar(_) => false,
            Expr::Binary { left, right, .. } => left.mentions(name) || right.mentions(name),
            Expr::Func { arg, .. } => arg.mentions(name),
        }
    }

    /// Number of times the vector `name` is read.
    pub fn count_mentions(&self, name: &str) -> usize {
        match self {
            Expr::Vector(n) => usize::from(n == name),
            Expr::Matrix(_) | Expr::Scalar(_) => 0,
            Expr::Binary { left, right, .. } => {
                left.count_mentions(name) + right.count_mentions(name)
            }
            Expr::Func { arg, .. } => arg.count_mentions(name),
        }
    }

    /// Height of the tree; leaves have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Vector(_) | Expr::Matrix(_) | Expr::Scalar(_) => 0,
            Expr::Binary { left, right, .. } => 1 + left.depth().max(right.depth()),
            Expr::Func { arg, .. } => 1 + arg.depth(),
        }
    }

    /// Walks down the left spine of the top-level `+`/`-` chain and returns
    /// the first term.
    pub fn leftmost_term(&self) -> &Expr {
        match self {
            Expr::Binary {
                op: BinOp::Add | BinOp::Sub,
                left,
                ..
            } => left.leftmost_term(),
            other => other,
        }
    }

    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Binary { left, right, .. } => {
                left.visit(f);
                right.visit(f);
            }
            Expr::Func { arg, .. } => arg.visit(f),
            _ => {}
        }
    }
}

fn expect_vector(op: &'static str, e: &Expr) -> Result<(), ExprError> {
    match e.kind() {
        Kind::Vector => Ok(()),
        found => Err(ExprError::Kind {
            op,
            operand: e.to_string(),
            expected: "vector",
            found,
        }),
    }
}

pub fn build_add(l: Expr, r: Expr) -> Result<Expr, ExprError> {
    expect_vector("+", &l)?;
    expect_vector("+", &r)?;
    Ok(Expr::Binary {
        op: BinOp::Add,
        left: Box::new(l),
        right: Box::new(r),
    })
}

pub fn build_sub(l: Expr, r: Expr) -> Result<Expr, ExprError> {
    expect_vector("-", &l)?;
    expect_vector("-", &r)?;
    Ok(Expr::Binary {
        op: BinOp::Sub,
        left: Box::new(l),
        right: Box::new(r),
    })
}

/// Builds `c * v`, normalizing so the scalar is the left operand. Either
/// argument order is accepted.
pub fn build_scalmul(a: Expr, b: Expr) -> Result<Expr, ExprError> {
    let (c, v) = match (a.kind(), b.kind()) {
        (Kind::Scalar, _) => (a, b),
        (_, Kind::Scalar) => (b, a),
        (found, _) => {
            return Err(ExprError::Kind {
                op: "*",
                operand: a.to_string(),
                expected: "scalar",
                found,
            })
        }
    };
    expect_vector("*", &v)?;
    Ok(Expr::Binary {
        op: BinOp::ScalMul,
        left: Box::new(c),
        right: Box::new(v),
    })
}

/// Builds `M * v` where `m` must be a matrix leaf.
pub fn build_matvec(m: Expr, v: Expr) -> Result<Expr, ExprError> {
    if !matches!(m, Expr::Matrix(_)) {
        return Err(ExprError::Kind {
            op: "*",
            operand: m.to_string(),
            expected: "matrix",
            found: m.kind(),
        });
    }
    expect_vector("*", &v)?;
    Ok(Expr::Binary {
        op: BinOp::MatVec,
        left: Box::new(m),
        right: Box::new(v),
    })
}

pub fn build_func(func: FuncId, arg: Expr) -> Result<Expr, ExprError> {
    expect_vector(func.name(), &arg)?;
    Ok(Expr::Func {
        func,
        arg: Box::new(arg),
    })
}

/// Fully parenthesized rendering; parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Vector(n) | Expr::Matrix(n) => f.write_str(n),
            Expr::Scalar(s) => write!(f, "{s}"),
            Expr::Binary { op, left, right } => {
                write!(f, "({left} {} {right})", op.symbol())
            }
            Expr::Func { func, arg } => {
                // Parentheses of the call already delimit the argument.
                match arg.as_ref() {
                    Expr::Binary { op, left, right } => {
                        write!(f, "{func}({left} {} {right})", op.symbol())
                    }
                    other => write!(f, "{func}({other})"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Expr {
        Expr::vector(n)
    }

    #[test]
    fn nested_add_is_left_deep() {
        let e = build_add(build_add(v("A"), v("B")).unwrap(), v("C")).unwrap();
        let Expr::Binary { op, left, right } = &e else {
            panic!("expected binary node");
        };
        assert_eq!(*op, BinOp::Add);
        assert_eq!(**right, v("C"));
        assert_eq!(
            **left,
            Expr::Binary {
                op: BinOp::Add,
                left: Box::new(v("A")),
                right: Box::new(v("B")),
            }
        );
        assert_eq!(e.to_string(), "((A + B) + C)");
    }

    #[test]
    fn scalmul_normalizes_scalar_left() {
        let a = build_scalmul(Expr::scalar(2.0), v("A")).unwrap();
        let b = build_scalmul(v("A"), Expr::scalar(2.0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a,
            Expr::Binary {
                op: BinOp::ScalMul,
                left: Box::new(Expr::Scalar(Scalar::Literal(2.0))),
                right: Box::new(v("A")),
            }
        );
    }

    #[test]
    fn func_wraps_argument() {
        let e = build_func(FuncId::Sin, build_add(v("A"), v("B")).unwrap()).unwrap();
        assert_eq!(e.to_string(), "sin(A + B)");
        assert!(matches!(
            e,
            Expr::Func {
                func: FuncId::Sin,
                ..
            }
        ));
    }

    #[test]
    fn kind_mismatch_names_operand() {
        let err = build_add(Expr::scalar("c"), v("A")).unwrap_err();
        match err {
            ExprError::Kind { operand, found, .. } => {
                assert_eq!(operand, "c");
                assert_eq!(found, Kind::Scalar);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_scalmul(v("A"), v("B")).is_err());
        assert!(build_scalmul(Expr::scalar(1.0), Expr::scalar(2.0)).is_err());
        assert!(build_matvec(v("A"), v("y")).is_err());
        assert!(build_matvec(Expr::matrix("M"), Expr::matrix("N")).is_err());
        assert!(build_func(FuncId::Log, Expr::matrix("M")).is_err());
    }

    #[test]
    fn leftmost_term_follows_additive_spine() {
        let e = build_sub(
            build_add(build_scalmul(Expr::scalar("c"), v("y")).unwrap(), v("x")).unwrap(),
            v("z"),
        )
        .unwrap();
        assert_eq!(
            e.leftmost_term(),
            &build_scalmul(Expr::scalar("c"), v("y")).unwrap()
        );
        assert_eq!(e.count_mentions("y"), 1);
        assert_eq!(e.depth(), 3);
    }

    #[test]
    fn func_domain() {
        assert_eq!(FuncId::Log.eval(1.0), Some(0.0));
        assert_eq!(FuncId::Log.eval(0.0), None);
        assert_eq!(FuncId::Log.eval(-1.0), None);
        assert_eq!(FuncId::Sin.eval(0.0), Some(0.0));
        assert_eq!(FuncId::Cos.eval(0.0), Some(1.0));
    }
}
