//! A named real basis of the truncated 𝔬𝔰𝔭 plus the central generator.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, I};
use crate::superalgebra::{CentralElement, OspElement, Parity, RealLinearOperator, TruncatedSpace};
use num_complex::Complex64;

/// Named element of the extended superalgebra.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub element: CentralElement,
}

fn unit(d: usize, i: usize, j: usize, z: Complex64) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] += z;
    m
}

fn even(space: &TruncatedSpace, lin: CMatrix, conj: CMatrix) -> OspElement {
    let op = RealLinearOperator::new(lin, conj).expect("square");
    OspElement::new(*space, op, Parity::Even).expect("block-diagonal")
}

fn odd(space: &TruncatedSpace, lin: CMatrix, conj: CMatrix) -> OspElement {
    let op = RealLinearOperator::new(lin, conj).expect("square");
    OspElement::new(*space, op, Parity::Odd).expect("block-off-diagonal")
}

/// Real basis of the truncated 𝔬𝔰𝔭 followed by `central` = (0, 1) and
/// `number` = (i·Id, 0).
///
/// Names use 1-based mode numbers: `lin_ff_re_12` is `E₁₂ − E₂₁` on the
/// fermionic block, `odd_conj_im_b1f2` is the odd element whose
/// conjugate-linear part sends `f₂` to `i·b₁`.
pub fn generator_family(space: &TruncatedSpace) -> Vec<Generator> {
    let d = space.dim();
    let one = Complex64::new(1.0, 0.0);
    let z = CMatrix::zeros(d, d);
    let mut out = Vec::new();
    let mut push = |name: String, x: OspElement| {
        out.push(Generator { name, element: CentralElement::from(x) });
    };
    let blocks = [("ff", 0, space.m_f()), ("bb", space.m_f(), space.m_b())];

    for (tag, off, m) in blocks {
        for p in 0..m {
            push(format!("lin_{tag}_diag_{}", p + 1), even(space, unit(d, off + p, off + p, I), z.clone()));
            for q in p + 1..m {
                let (a, b) = (off + p, off + q);
                let re = unit(d, a, b, one) - unit(d, b, a, one);
                let im = unit(d, a, b, I) + unit(d, b, a, I);
                push(format!("lin_{tag}_re_{}{}", p + 1, q + 1), even(space, re, z.clone()));
                push(format!("lin_{tag}_im_{}{}", p + 1, q + 1), even(space, im, z.clone()));
            }
        }
    }
    for (tag, off, m) in blocks {
        let symmetric = off != 0;
        for p in 0..m {
            let start = if symmetric { p } else { p + 1 };
            for q in start..m {
                let (a, b) = (off + p, off + q);
                for (part, w) in [("re", one), ("im", I)] {
                    let mat = if a == b {
                        unit(d, a, a, w)
                    } else if symmetric {
                        unit(d, a, b, w) + unit(d, b, a, w)
                    } else {
                        unit(d, a, b, w) - unit(d, b, a, w)
                    };
                    push(format!("conj_{tag}_{part}_{}{}", p + 1, q + 1), even(space, z.clone(), mat));
                }
            }
        }
    }
    for kind in ["lin", "conj"] {
        for q in 0..space.m_b() {
            for p in 0..space.m_f() {
                let (bq, fp) = (space.m_f() + q, p);
                for (part, w) in [("re", one), ("im", I)] {
                    // lower block X at (b, f); upper block i·X^H (lin) or −i·X^T (conj).
                    let lower = unit(d, bq, fp, w);
                    let element = if kind == "lin" {
                        let upper = lower.adjoint() * I;
                        odd(space, lower + upper, z.clone())
                    } else {
                        let upper = lower.transpose() * -I;
                        odd(space, z.clone(), lower + upper)
                    };
                    push(format!("odd_{kind}_{part}_b{}f{}", q + 1, p + 1), element);
                }
            }
        }
    }
    out.push(Generator { name: "central".into(), element: CentralElement::central(*space, 1.0) });
    out.push(Generator {
        name: "number".into(),
        element: CentralElement::from(even(space, CMatrix::identity(d, d) * I, z)),
    });
    out
}

pub fn find_generator(family: &[Generator], name: &str) -> Result<Generator> {
    family
        .iter()
        .find(|g| g.name == name)
        .cloned()
        .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_size_and_membership() {
        let s = TruncatedSpace::new(2, 2).unwrap();
        let fam = generator_family(&s);
        let evens = fam.iter().filter(|g| g.element.parity() == Parity::Even && g.name != "central").count();
        let odds = fam.iter().filter(|g| g.element.parity() == Parity::Odd).count();
        // 16 even basis elements plus `number`, 16 odd, and `central`.
        assert_eq!((evens, odds, fam.len()), (17, 16, 34));
        for g in &fam {
            assert!(g.element.body().residual() < 1e-15, "{} residual {}", g.name, g.element.body().residual());
        }
        assert!(find_generator(&fam, "nope").is_err());
    }
}
