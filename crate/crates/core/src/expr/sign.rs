use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

/// Additive marker carried through lowering: whether a term is added to or
/// subtracted from the destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// The addition rule: `{+,+} -> +`, `{+,-} -> -`, `{-,+} -> -`, `{-,-} -> +`.
    pub fn combine(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Plus, op) => op,
            (Sign::Minus, Sign::Plus) => Sign::Minus,
            (Sign::Minus, Sign::Minus) => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    /// Applies the sign to an update: `acc + x` or `acc - x`.
    #[inline]
    pub fn apply(self, acc: f64, x: f64) -> f64 {
        match self {
            Sign::Plus => acc + x,
            Sign::Minus => acc - x,
        }
    }
}

/// Free-function form of [`Sign::combine`].
pub fn combine_signs(a: Sign, b: Sign) -> Sign {
    a.combine(b)
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        self.combine(rhs)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_rule_table() {
        assert_eq!(combine_signs(Sign::Plus, Sign::Plus), Sign::Plus);
        assert_eq!(combine_signs(Sign::Plus, Sign::Minus), Sign::Minus);
        assert_eq!(combine_signs(Sign::Minus, Sign::Plus), Sign::Minus);
        assert_eq!(combine_signs(Sign::Minus, Sign::Minus), Sign::Plus);
    }

    #[test]
    fn group_laws_hold_exhaustively() {
        for a in Sign::ALL {
            assert_eq!(Sign::Plus * a, a);
            assert_eq!(a * a, Sign::Plus);
            for b in Sign::ALL {
                assert_eq!(a * b, b * a);
                for c in Sign::ALL {
                    assert_eq!(a * (b * c), (a * b) * c);
                }
            }
        }
    }

    #[test]
    fn apply_matches_arithmetic() {
        assert_eq!(Sign::Plus.apply(5.0, 2.0), 7.0);
        assert_eq!(Sign::Minus.apply(5.0, 2.0), 3.0);
    }
}
