//! The oscillator representation on reduced monomials.
//!
//! `ρ(T, z) = ρ(T_lin) + a(T_conj) − a(T_conj)^† + i z`, where `ρ(T_lin)`
//! acts as a graded derivation and `a(T_conj)` multiplies each degree-`n`
//! component by the quadratic element
//! `λ_n (i Σ_r (T_conj b_r) b_r + Σ_r (T_conj f_r) f_r)` with
//! `λ_n = ½√((n+1)(n+2))`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::index::{reduce_word, FockBasis, FockIndex};
use super::operator::{FockOperator, SparseMatrix};
use super::vector::FockVector;
use crate::error::Result;
use crate::linalg::{CMatrix, I};
use crate::superalgebra::{CentralElement, OspElement, Parity};

/// `λ_{k,l}`; depends only on the total degree `k + l`.
pub fn lambda(k: usize, l: usize) -> f64 {
    let n = (k + l) as f64;
    0.5 * ((n + 1.0) * (n + 2.0)).sqrt()
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Derivation action of `T_lin` on one monomial, accumulated into `out`.
fn rho_lin_monomial(x: &OspElement, idx: &FockIndex, amp: Complex64, out: &mut FockVector) {
    let space = x.space();
    let a = x.lin();
    let odd = x.parity() == Parity::Odd;
    let mut word = idx.word(space);
    let mut fermions_before = 0usize;
    for r in 0..word.len() {
        let mode = word[r];
        // The sign counts Fock parity (fermion factors) passed by an odd operator.
        let sign = if odd && fermions_before % 2 == 1 { -1.0 } else { 1.0 };
        for j in 0..space.dim() {
            let coef = a[(j, mode)];
            if coef == zero() {
                continue;
            }
            word[r] = j;
            if let Some((s, reduced)) = reduce_word(space, &word) {
                out.add_term(reduced, amp * coef * (sign * s));
            }
        }
        word[r] = mode;
        if space.is_fermionic(mode) {
            fermions_before += 1;
        }
    }
}

/// `ρ(T_lin) v`.
pub fn rho_lin(x: &OspElement, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (idx, amp) in v.iter() {
        rho_lin_monomial(x, idx, *amp, &mut out);
    }
    out
}

fn a_monomial(x: &OspElement, idx: &FockIndex, amp: Complex64, out: &mut FockVector) {
    let space = x.space();
    let b = x.conj_part();
    let (k, l) = idx.grade();
    let lam = lambda(k, l);
    let tail = idx.word(space);
    let mut word = Vec::with_capacity(tail.len() + 2);
    for r in 0..space.dim() {
        let weight = if space.is_fermionic(r) { Complex64::new(1.0, 0.0) } else { I };
        // T_conj e_r = B·conj(e_r) = column r of B.
        for j in 0..space.dim() {
            let coef = b[(j, r)];
            if coef == zero() {
                continue;
            }
            word.clear();
            word.push(j);
            word.push(r);
            word.extend_from_slice(&tail);
            if let Some((s, reduced)) = reduce_word(space, &word) {
                out.add_term(reduced, amp * coef * weight * (lam * s));
            }
        }
    }
}

/// `a(T_conj) v`, computed exactly (no degree cap).
pub fn a_op(x: &OspElement, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (idx, amp) in v.iter() {
        a_monomial(x, idx, *amp, &mut out);
    }
    out
}

/// Assembles columns in parallel, dropping images outside the basis.
fn assemble<F>(basis: &FockBasis, column: F) -> CMatrix
where
    F: Fn(&FockIndex, &mut FockVector) + Sync,
{
    let cols: Vec<Vec<(usize, Complex64)>> = (0..basis.len())
        .into_par_iter()
        .map(|j| {
            let mut image = FockVector::zero();
            column(basis.index(j), &mut image);
            image
                .iter()
                .filter_map(|(idx, z)| basis.position(idx).map(|i| (i, *z)))
                .collect()
        })
        .collect();
    let mut m = CMatrix::zeros(basis.len(), basis.len());
    for (j, col) in cols.into_iter().enumerate() {
        for (i, z) in col {
            m[(i, j)] = z;
        }
    }
    m
}

fn rho_lin_dense(x: &OspElement, basis: &FockBasis) -> CMatrix {
    assemble(basis, |idx, out| rho_lin_monomial(x, idx, Complex64::new(1.0, 0.0), out))
}

fn a_dense(x: &OspElement, basis: &FockBasis) -> CMatrix {
    assemble(basis, |idx, out| a_monomial(x, idx, Complex64::new(1.0, 0.0), out))
}

/// Superadjoint of `a`: `G⁻¹ a^H G`, times `−i` for odd `x`, with `G` the
/// diagonal Gram matrix of the monomial basis.
fn a_dagger_dense(x: &OspElement, basis: &FockBasis, a: &CMatrix) -> CMatrix {
    let g = basis.gram_weights();
    let twist = match x.parity() {
        Parity::Even => Complex64::new(1.0, 0.0),
        Parity::Odd => -I,
    };
    CMatrix::from_fn(basis.len(), basis.len(), |i, j| a[(j, i)].conj() * (g[j] / g[i]) * twist)
}

fn conj_safe_degree(x: &OspElement, basis: &FockBasis) -> usize {
    if x.has_conj_part() {
        basis.degree_cap().saturating_sub(2)
    } else {
        basis.degree_cap()
    }
}

pub fn rho_lin_matrix(x: &OspElement, basis: &Arc<FockBasis>) -> FockOperator {
    FockOperator::from_dense(basis.clone(), &rho_lin_dense(x, basis), basis.degree_cap())
}

/// Matrix of `a(T_conj)` at the basis cap; images beyond the cap are clipped.
pub fn a_matrix(x: &OspElement, basis: &Arc<FockBasis>) -> FockOperator {
    FockOperator::from_dense(basis.clone(), &a_dense(x, basis), basis.degree_cap().saturating_sub(2))
}

pub fn a_dagger(x: &OspElement, basis: &Arc<FockBasis>) -> FockOperator {
    let a = a_dense(x, basis);
    FockOperator::from_dense(basis.clone(), &a_dagger_dense(x, basis, &a), basis.degree_cap().saturating_sub(2))
}

/// Dense matrix of `ρ(u)` on the monomial basis, without checking membership.
pub fn rho_full_dense_unchecked(u: &CentralElement, basis: &FockBasis) -> CMatrix {
    let x = u.body();
    let mut m = rho_lin_dense(x, basis);
    if x.has_conj_part() {
        let a = a_dense(x, basis);
        let ad = a_dagger_dense(x, basis, &a);
        m += a - ad;
    }
    if u.z() != 0.0 {
        for i in 0..basis.len() {
            m[(i, i)] += I * u.z();
        }
    }
    m
}

/// `ρ(u)` for an element whose body may fail the membership test.
pub fn rho_full_unchecked(u: &CentralElement, basis: &Arc<FockBasis>) -> FockOperator {
    let m = rho_full_dense_unchecked(u, basis);
    FockOperator::new(basis.clone(), SparseMatrix::from_dense(&m), conj_safe_degree(u.body(), basis))
}

/// `ρ(u)` on the truncated Fock space; the body must be certified.
pub fn rho_full(u: &CentralElement, basis: &Arc<FockBasis>) -> Result<FockOperator> {
    u.body().ensure_certified()?;
    Ok(rho_full_unchecked(u, basis))
}

/// Dense `ρ(u)` after the membership check.
pub fn rho_full_dense(u: &CentralElement, basis: &FockBasis) -> Result<CMatrix> {
    u.body().ensure_certified()?;
    Ok(rho_full_dense_unchecked(u, basis))
}
