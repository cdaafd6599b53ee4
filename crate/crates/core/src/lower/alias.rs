use super::{AssignMode, Statement};
use crate::expr::{BinOp, Expr};

/// How a statement whose destination may also be read is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AliasStrategy {
    /// The destination is not read by the right-hand side.
    NoAlias,
    /// `y = y + ...` or `y = c*y + ...` with no other read of `y`: the
    /// leftmost unit is applied in place and the initial copy is elided.
    InPlace,
    /// Any other read of the destination: evaluate the whole right-hand side
    /// into a temporary, then copy (or accumulate) it into the destination.
    ViaTemp,
}

/// Chooses the evaluation strategy for a statement's destination.
pub fn alias_guard(stmt: &Statement) -> AliasStrategy {
    let reads = stmt.rhs.count_mentions(&stmt.dst);
    if reads == 0 {
        return AliasStrategy::NoAlias;
    }
    if stmt.mode != AssignMode::Assign || reads > 1 {
        return AliasStrategy::ViaTemp;
    }
    let in_place = match stmt.rhs.leftmost_term() {
        Expr::Vector(n) => *n == stmt.dst,
        Expr::Binary {
            op: BinOp::ScalMul,
            right,
            ..
        } => right.as_vector_name() == Some(stmt.dst.as_str()),
        _ => false,
    };
    if in_place {
        AliasStrategy::InPlace
    } else {
        AliasStrategy::ViaTemp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{build_add, build_func, build_scalmul, build_sub, FuncId};

    fn v(n: &str) -> Expr {
        Expr::vector(n)
    }

    fn cx(c: &str, x: &str) -> Expr {
        build_scalmul(Expr::scalar(c), v(x)).unwrap()
    }

    #[test]
    fn leftmost_leaf_is_in_place() {
        let s = Statement::assign("y", build_add(v("y"), cx("c", "x")).unwrap());
        assert_eq!(alias_guard(&s), AliasStrategy::InPlace);
        let s = Statement::assign("y", cx("c", "y"));
        assert_eq!(alias_guard(&s), AliasStrategy::InPlace);
        let s = Statement::assign("y", build_sub(cx("c", "y"), v("x")).unwrap());
        assert_eq!(alias_guard(&s), AliasStrategy::InPlace);
    }

    #[test]
    fn other_positions_go_through_temp() {
        let s = Statement::assign("y", build_add(cx("c", "x"), v("y")).unwrap());
        assert_eq!(alias_guard(&s), AliasStrategy::ViaTemp);
        let s = Statement::assign("y", build_add(v("y"), v("y")).unwrap());
        assert_eq!(alias_guard(&s), AliasStrategy::ViaTemp);
        let s = Statement::assign("y", build_func(FuncId::Sin, v("y")).unwrap());
        assert_eq!(alias_guard(&s), AliasStrategy::ViaTemp);
        let s = Statement::new(
            "y",
            AssignMode::PlusAssign,
            build_add(v("y"), v("x")).unwrap(),
        );
        assert_eq!(alias_guard(&s), AliasStrategy::ViaTemp);
    }

    #[test]
    fn absent_destination_is_untouched() {
        let s = Statement::assign("x", build_add(v("A"), v("B")).unwrap());
        assert_eq!(alias_guard(&s), AliasStrategy::NoAlias);
    }
}
