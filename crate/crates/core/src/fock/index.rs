use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::superalgebra::{Parity, TruncatedSpace};

/// Tag written into serialized matrices; bump when the basis order changes.
pub const ENUMERATION_VERSION: &str = "graded-lex-v1";

/// Occupation record of the reduced monomial
/// `f₁^{r₁}⋯f_{m_f}^{r_{m_f}} b₁^{s₁}⋯b_{m_b}^{s_{m_b}}`.
///
/// Bit `j` of `ferm` is `r_{j+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockIndex {
    ferm: u32,
    bos: Vec<u32>,
}

impl FockIndex {
    pub fn new(ferm: u32, bos: Vec<u32>) -> Self {
        Self { ferm, bos }
    }

    pub fn vacuum(space: &TruncatedSpace) -> Self {
        Self { ferm: 0, bos: vec![0; space.m_b()] }
    }

    pub fn ferm_bits(&self) -> u32 {
        self.ferm
    }

    pub fn bos(&self) -> &[u32] {
        &self.bos
    }

    pub fn has_fermion(&self, j: usize) -> bool {
        self.ferm >> j & 1 == 1
    }

    pub fn k(&self) -> usize {
        self.ferm.count_ones() as usize
    }

    pub fn l(&self) -> usize {
        self.bos.iter().map(|&s| s as usize).sum()
    }

    pub fn degree(&self) -> usize {
        self.k() + self.l()
    }

    pub fn grade(&self) -> (usize, usize) {
        (self.k(), self.l())
    }

    /// Monomial parity: the fermion count mod 2.
    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.k())
    }

    /// Squared norm of the monomial, `Π s_j! / (k+l)!`.
    pub fn gram_weight(&self) -> f64 {
        let mut w = 1.0;
        for &s in &self.bos {
            for q in 2..=s {
                w *= q as f64;
            }
        }
        for q in 2..=self.degree() {
            w /= q as f64;
        }
        w
    }

    /// The factor sequence in reduced order, as mode indices into 𝒦.
    pub fn word(&self, space: &TruncatedSpace) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.degree());
        for j in 0..space.m_f() {
            if self.has_fermion(j) {
                w.push(j);
            }
        }
        for (r, &s) in self.bos.iter().enumerate() {
            for _ in 0..s {
                w.push(space.m_f() + r);
            }
        }
        w
    }

    /// Human-readable form such as `f1f2b1^2`; the vacuum is `1`.
    pub fn label(&self) -> String {
        let mut out = String::new();
        for j in 0..32 {
            if self.has_fermion(j) {
                out.push_str(&format!("f{}", j + 1));
            }
        }
        for (r, &s) in self.bos.iter().enumerate() {
            match s {
                0 => {}
                1 => out.push_str(&format!("b{}", r + 1)),
                _ => out.push_str(&format!("b{}^{}", r + 1, s)),
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }
}

/// Brings a word of mode indices into reduced order.
///
/// Fermions anticommute among themselves, bosons commute, and fermions
/// commute with bosons. Returns `None` when a fermionic mode repeats.
pub fn reduce_word(space: &TruncatedSpace, word: &[usize]) -> Option<(f64, FockIndex)> {
    let mut ferm = 0u32;
    let mut bos = vec![0u32; space.m_b()];
    let mut inversions = 0usize;
    for &m in word {
        if space.is_fermionic(m) {
            if ferm >> m & 1 == 1 {
                return None;
            }
            // Each earlier fermion with a larger mode index must pass this one.
            inversions += (ferm >> (m + 1)).count_ones() as usize;
            ferm |= 1 << m;
        } else {
            bos[m - space.m_f()] += 1;
        }
    }
    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, FockIndex { ferm, bos }))
}

/// Enumerated reduced monomials of total degree at most `degree_cap`.
///
/// Order: ascending degree, then `k`, then the fermion bitset as a binary
/// number, then the boson occupations lexicographically. Degree-bounded
/// subspaces are therefore prefixes of the basis.
#[derive(Clone, Debug)]
pub struct FockBasis {
    space: TruncatedSpace,
    degree_cap: usize,
    indices: Vec<FockIndex>,
    lookup: HashMap<FockIndex, usize>,
    prefix_len: Vec<usize>,
}

impl FockBasis {
    pub fn new(space: TruncatedSpace, degree_cap: usize) -> Result<Self> {
        if space.m_f() > 32 {
            return Err(Error::Precondition(format!("at most 32 fermionic modes supported, got {}", space.m_f())));
        }
        let mut indices = Vec::new();
        let mut prefix_len = Vec::with_capacity(degree_cap + 1);
        for n in 0..=degree_cap {
            for k in 0..=n.min(space.m_f()) {
                let ferms: Vec<u32> = (0u32..(1u32 << space.m_f()))
                    .filter(|b| b.count_ones() as usize == k)
                    .collect();
                let mut comps = Vec::new();
                compositions(n - k, space.m_b(), &mut Vec::new(), &mut comps);
                comps.sort();
                for &f in &ferms {
                    for b in &comps {
                        indices.push(FockIndex { ferm: f, bos: b.clone() });
                    }
                }
            }
            prefix_len.push(indices.len());
        }
        let lookup = indices.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        Ok(Self { space, degree_cap, indices, lookup, prefix_len })
    }

    pub fn space(&self) -> &TruncatedSpace {
        &self.space
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[FockIndex] {
        &self.indices
    }

    pub fn index(&self, pos: usize) -> &FockIndex {
        &self.indices[pos]
    }

    pub fn position(&self, idx: &FockIndex) -> Option<usize> {
        self.lookup.get(idx).copied()
    }

    /// Number of basis monomials of degree at most `degree`.
    pub fn count_up_to(&self, degree: usize) -> usize {
        self.prefix_len[degree.min(self.degree_cap)]
    }

    pub fn gram_weights(&self) -> Vec<f64> {
        self.indices.iter().map(FockIndex::gram_weight).collect()
    }
}

fn compositions(total: usize, parts: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        current.push(total as u32);
        out.push(current.clone());
        current.pop();
        return;
    }
    for first in 0..=total {
        current.push(first as u32);
        compositions(total - first, parts - 1, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> TruncatedSpace {
        TruncatedSpace::new(2, 2).unwrap()
    }

    #[test]
    fn basis_size_matches_count_by_grade() {
        let s = space();
        let basis = FockBasis::new(s, 8).unwrap();
        // Per degree n: Σ_k C(2,k)·(n−k+1) for n−k ≥ 0.
        let mut expected = 0;
        for n in 0..=8usize {
            for (k, binom) in [(0usize, 1usize), (1, 2), (2, 1)] {
                if k <= n {
                    expected += binom * (n - k + 1);
                }
            }
        }
        assert_eq!(basis.len(), expected);
        assert_eq!(basis.count_up_to(0), 1);
        assert_eq!(basis.count_up_to(1), 5);
    }

    #[test]
    fn enumeration_order_within_degree_two() {
        let basis = FockBasis::new(space(), 2).unwrap();
        let labels: Vec<String> = basis.indices()[5..].iter().map(FockIndex::label).collect();
        assert_eq!(labels, ["b2^2", "b1b2", "b1^2", "f1b2", "f1b1", "f2b2", "f2b1", "f1f2"]);
    }

    #[test]
    fn reduce_word_signs() {
        let s = space();
        let (sign, idx) = reduce_word(&s, &[1, 0]).unwrap();
        assert_eq!((sign, idx.label().as_str()), (-1.0, "f1f2"));
        let (sign, idx) = reduce_word(&s, &[3, 2]).unwrap();
        assert_eq!((sign, idx.label().as_str()), (1.0, "b1b2"));
        assert!(reduce_word(&s, &[0, 0]).is_none());
        let (sign, idx) = reduce_word(&s, &[2, 0]).unwrap();
        assert_eq!((sign, idx.label().as_str()), (1.0, "f1b1"));
    }

    #[test]
    fn gram_weights() {
        assert_eq!(FockIndex::new(0, vec![0, 0]).gram_weight(), 1.0);
        assert_eq!(FockIndex::new(1, vec![1, 0]).gram_weight(), 0.5);
        assert_eq!(FockIndex::new(0, vec![2, 0]).gram_weight(), 1.0);
        assert!((FockIndex::new(3, vec![1, 1]).gram_weight() - 1.0 / 24.0).abs() < 1e-16);
    }
}
