use super::{Instruction, KernelPlan};
use crate::expr::{Scalar, Sign};

fn is_one(s: &Scalar) -> bool {
    matches!(s, Scalar::Literal(v) if *v == 1.0)
}

/// Fuses one adjacent instruction pair, if it matches a known pattern.
fn fuse(a: &Instruction, b: &Instruction) -> Option<Instruction> {
    match (a, b) {
        (
            Instruction::Copy { dst, src },
            Instruction::Axpy {
                dst: d2,
                sign: Sign::Plus,
                alpha,
                src: other,
            },
        ) if dst == d2 && is_one(alpha) && dst != src && dst != other && src != other => {
            Some(Instruction::VAdd {
                dst: dst.clone(),
                a: src.clone(),
                b: other.clone(),
            })
        }
        (Instruction::Copy { dst, src }, Instruction::Scal { dst: d2, alpha })
            if dst == d2 && dst != src =>
        {
            Some(Instruction::ScaledCopy {
                dst: dst.clone(),
                alpha: alpha.clone(),
                src: src.clone(),
            })
        }
        _ => None,
    }
}

/// Peephole pass replacing short instruction windows with fused kernels:
///
/// * `copy d<-a; axpy d += 1*b` becomes `vadd d = a + b`
/// * `copy d<-a; scal d *= c` becomes `scaledcopy d = c*a`
///
/// The fused kernels do the same per-element arithmetic, so results are
/// bit-identical. No fused instruction starts another window, which makes
/// the pass idempotent.
pub fn specialize(plan: &KernelPlan) -> KernelPlan {
    let src = &plan.instrs;
    let mut out = Vec::with_capacity(src.len());
    let mut i = 0;
    while i < src.len() {
        if let Some(fused) = src.get(i + 1).and_then(|next| fuse(&src[i], next)) {
            out.push(fused);
            i += 2;
        } else {
            out.push(src[i].clone());
            i += 1;
        }
    }
    KernelPlan {
        instrs: out,
        ..plan.clone()
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::lower::VecRef;

    fn plan(instrs: Vec<Instruction>) -> KernelPlan {
        KernelPlan {
            instrs,
            temps: BTreeMap::new(),
            dst: "X".into(),
            source_stmt: None,
        }
    }

    fn copy(d: &str, s: &str) -> Instruction {
        Instruction::Copy {
            dst: d.into(),
            src: s.into(),
        }
    }

    fn axpy(d: &str, sign: Sign, alpha: Scalar, s: &str) -> Instruction {
        Instruction::Axpy {
            dst: d.into(),
            sign,
            alpha,
            src: s.into(),
        }
    }

    #[test]
    fn copy_axpy_becomes_vadd() {
        let p = plan(vec![
            copy("X", "A"),
            axpy("X", Sign::Plus, Scalar::ONE, "B"),
            axpy("X", Sign::Plus, Scalar::ONE, "C"),
        ]);
        let s = specialize(&p);
        assert_eq!(
            s.instrs,
            vec![
                Instruction::VAdd {
                    dst: "X".into(),
                    a: "A".into(),
                    b: "B".into()
                },
                axpy("X", Sign::Plus, Scalar::ONE, "C"),
            ]
        );
        assert_eq!(specialize(&s), s);
    }

    #[test]
    fn copy_scal_becomes_scaledcopy() {
        let p = plan(vec![
            copy("X", "A"),
            Instruction::Scal {
                dst: "X".into(),
                alpha: Scalar::named("c"),
            },
        ]);
        assert_eq!(
            specialize(&p).instrs,
            vec![Instruction::ScaledCopy {
                dst: VecRef::named("X"),
                alpha: Scalar::named("c"),
                src: "A".into()
            }]
        );
    }

    #[test]
    fn non_matching_windows_are_kept() {
        let keep = [
            vec![copy("X", "A"), axpy("X", Sign::Minus, Scalar::ONE, "B")],
            vec![
                copy("X", "A"),
                axpy("X", Sign::Plus, Scalar::named("c"), "B"),
            ],
            vec![copy("X", "A"), axpy("X", Sign::Plus, Scalar::ONE, "A")],
            vec![copy("X", "A"), axpy("Y", Sign::Plus, Scalar::ONE, "B")],
            vec![copy("X", "A"), axpy("X", Sign::Plus, Scalar::ONE, "X")],
        ];
        for instrs in keep {
            let p = plan(instrs);
            assert_eq!(specialize(&p), p);
        }
    }
}
