use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_complex::Complex64;

use super::index::{reduce_word, FockBasis, FockIndex};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::superalgebra::TruncatedSpace;

/// Finitely supported combination of reduced monomials.
///
/// Amplitudes are coefficients of the monomials themselves, which are
/// orthogonal but not normalized; see [`FockIndex::gram_weight`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockVector {
    amps: BTreeMap<FockIndex, Complex64>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(idx: FockIndex) -> Self {
        Self::term(idx, Complex64::new(1.0, 0.0))
    }

    pub fn term(idx: FockIndex, amp: Complex64) -> Self {
        let mut v = Self::zero();
        v.add_term(idx, amp);
        v
    }

    /// Adds `amp` to the coefficient of `idx`, dropping exact zeros.
    pub fn add_term(&mut self, idx: FockIndex, amp: Complex64) {
        if amp == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.amps.entry(idx) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += amp;
                if *slot.get() == Complex64::new(0.0, 0.0) {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(amp);
            }
        }
    }

    pub fn get(&self, idx: &FockIndex) -> Complex64 {
        self.amps.get(idx).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockIndex, &Complex64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.amps.keys().map(FockIndex::degree).max()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = Self::zero();
        for (idx, a) in &self.amps {
            out.add_term(idx.clone(), a * s);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (idx, a) in &other.amps {
            out.add_term(idx.clone(), *a);
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn norm(&self) -> f64 {
        fock_inner(self, self).re.max(0.0).sqrt()
    }

    /// Coordinates in the enumerated basis; monomials outside it are an error.
    pub fn to_dense(&self, basis: &FockBasis) -> Result<CVector> {
        let mut v = CVector::zeros(basis.len());
        for (idx, a) in &self.amps {
            let pos = basis.position(idx).ok_or(Error::OutsideSafeInterior {
                degree: idx.degree(),
                max: basis.degree_cap(),
            })?;
            v[pos] = *a;
        }
        Ok(v)
    }

    pub fn from_dense(basis: &FockBasis, v: &CVector) -> Self {
        let mut out = Self::zero();
        for (pos, a) in v.iter().enumerate() {
            out.add_term(basis.index(pos).clone(), *a);
        }
        out
    }
}

/// `⟨v, w⟩ = Σ conj(v_m) w_m ⟨m, m⟩`, conjugate-linear in `v`.
pub fn fock_inner(v: &FockVector, w: &FockVector) -> Complex64 {
    let (small, large, flip) = if v.len() <= w.len() { (v, w, false) } else { (w, v, true) };
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, a) in small.iter() {
        if let Some(b) = large.amps.get(idx) {
            let g = idx.gram_weight();
            acc += if flip { b.conj() * a * g } else { a.conj() * b * g };
        }
    }
    acc
}

/// Expands the product of `factors` multilinearly and reduces each word.
pub fn reduce_monomial(space: &TruncatedSpace, factors: &[CVector], coefficient: Complex64) -> Result<FockVector> {
    for f in factors {
        if f.len() != space.dim() {
            return Err(Error::FactorOutsideSpace(format!(
                "factor has {} components, space has dimension {}",
                f.len(),
                space.dim()
            )));
        }
    }
    let supports: Vec<Vec<(usize, Complex64)>> = factors
        .iter()
        .map(|f| {
            f.iter()
                .enumerate()
                .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
                .map(|(j, z)| (j, *z))
                .collect()
        })
        .collect();
    let mut out = FockVector::zero();
    let mut word = Vec::with_capacity(factors.len());
    expand(space, &supports, coefficient, &mut word, &mut out);
    Ok(out)
}

fn expand(
    space: &TruncatedSpace,
    supports: &[Vec<(usize, Complex64)>],
    coef: Complex64,
    word: &mut Vec<usize>,
    out: &mut FockVector,
) {
    let depth = word.len();
    if depth == supports.len() {
        if let Some((sign, idx)) = reduce_word(space, word) {
            out.add_term(idx, coef * sign);
        }
        return;
    }
    for &(j, z) in &supports[depth] {
        word.push(j);
        expand(space, supports, coef * z, word, out);
        word.pop();
    }
}
