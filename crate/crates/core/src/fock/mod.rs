//! Truncated super Fock space and the oscillator representation.
//!
//! Basis vectors are reduced monomials `f₁^{r₁}⋯b₁^{s₁}⋯` of total degree at
//! most `D`. The monomials are orthogonal with squared norm
//! `Π s_j! / (k+l)!`, the normalization under which `λ_{k,l}` makes `ρ`
//! skew-adjoint on even elements.

mod action;
mod index;
mod operator;
mod vector;

pub use action::{
    a_dagger, a_matrix, a_op, lambda, rho_full, rho_full_dense, rho_full_dense_unchecked, rho_full_unchecked,
    rho_lin, rho_lin_matrix,
};
pub use index::{reduce_word, FockBasis, FockIndex, ENUMERATION_VERSION};
pub use operator::{fmt_f64, FockOperator, SparseMatrix};
pub use vector::{fock_inner, reduce_monomial, FockVector};

use crate::linalg::CMatrix;

/// `S M S⁻¹` restricted to degrees `≤ max_degree`, with `S = diag(√g)`.
///
/// This is the matrix of the compressed operator in an orthonormal basis,
/// so adjoints become conjugate transposes.
pub fn orthonormal_block(basis: &FockBasis, m: &CMatrix, max_degree: usize) -> CMatrix {
    let n = basis.count_up_to(max_degree);
    let s: Vec<f64> = basis.gram_weights().iter().map(|g| g.sqrt()).collect();
    CMatrix::from_fn(n, n, |i, j| m[(i, j)] * (s[i] / s[j]))
}
