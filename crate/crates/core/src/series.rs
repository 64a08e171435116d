//! Analytic-vector series on the truncated Fock space: orbit series, growth
//! radii, Baker–Campbell–Hausdorff products and seminorm estimates.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{orthonormal_block, rho_full_dense, rho_full_dense_unchecked, FockBasis, FockVector};
use crate::linalg::{expm, mul, op_norm, CMatrix, CVector};
use crate::superalgebra::{exp_tail, extended_bracket, CentralElement, OspElement, Parity};
use crate::verify::{require_interior, IdentityReport};

/// Threshold on the tail bound, relative to `‖v‖`, for a converged series.
pub const SERIES_CONVERGED_TOL: f64 = 1e-10;

/// Slack below which the interpolation inequality counts as violated.
pub const INTERPOLATION_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub value: FockVector,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub converged: bool,
}

/// Norm of the diagonal Gram weighting, `‖v‖² = Σ g_m |v_m|²`.
pub fn gram_norm(basis: &FockBasis, v: &CVector) -> f64 {
    basis
        .gram_weights()
        .iter()
        .zip(v.iter())
        .map(|(g, z)| g * z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Operator norm of `m` with respect to the Gram inner product.
pub fn gram_op_norm(basis: &FockBasis, m: &CMatrix) -> f64 {
    op_norm(&orthonormal_block(basis, m, basis.degree_cap()))
}

/// `Σ_{n ≤ n_max} tⁿ/n! ρ(u)ⁿ v` with the tail bound
/// `Σ_{n > n_max} (|t|·‖ρ(u)‖)ⁿ/n! · ‖v‖`.
pub fn orbit_series(v: &FockVector, u: &CentralElement, t: f64, n_max: usize, basis: &FockBasis) -> Result<SeriesResult> {
    if u.parity() != Parity::Even {
        return Err(Error::WrongParity { even: true });
    }
    let m = rho_full_dense(u, basis)?;
    let v0 = v.to_dense(basis)?;
    let mut term = v0.clone();
    let mut sum = v0.clone();
    for n in 1..=n_max {
        term = &m * term * Complex64::new(t / n as f64, 0.0);
        sum += &term;
    }
    let a = t.abs() * gram_op_norm(basis, &m);
    let norm_v = gram_norm(basis, &v0);
    let tail_bound = exp_tail(a, n_max) * norm_v;
    Ok(SeriesResult {
        value: FockVector::from_dense(basis, &sum),
        terms_used: n_max,
        tail_bound,
        converged: tail_bound <= SERIES_CONVERGED_TOL * norm_v.max(1.0),
    })
}

/// `exp(tρ(u)) v` by the matrix exponential.
pub fn orbit_exact(v: &FockVector, u: &CentralElement, t: f64, basis: &FockBasis) -> Result<FockVector> {
    let m = rho_full_dense(u, basis)?;
    let e = expm(&(m * Complex64::new(t, 0.0)));
    Ok(FockVector::from_dense(basis, &(e * v.to_dense(basis)?)))
}

/// Growth-rate radius of the orbit series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// `1 / max_n (‖ρⁿv‖/n!)^{1/n}`, or `+∞` when the series is a polynomial
    /// or the orbit stays in a bounded degree.
    pub radius: f64,
    pub growth: f64,
    pub terms: usize,
    /// Set when `n_max` exceeds the depth at which powers remain exact.
    pub truncation_limited: bool,
}

pub fn radius_estimate(v: &FockVector, u: &CentralElement, n_max: usize, basis: &FockBasis) -> Result<RadiusEstimate> {
    let unbounded = RadiusEstimate { radius: f64::INFINITY, growth: 0.0, terms: 0, truncation_limited: false };
    if v.is_zero() {
        return Ok(unbounded);
    }
    let m = rho_full_dense(u, basis)?;
    let deg = v.max_degree().unwrap_or(0);
    if deg > basis.degree_cap() {
        return Err(Error::OutsideSafeInterior { degree: deg, max: basis.degree_cap() });
    }
    // Each application raises the degree by at most two, and only by zero
    // when there is no conjugate-linear part.
    let depth = if u.body().has_conj_part() { (basis.degree_cap() - deg) / 2 } else { n_max };
    let terms = n_max.min(depth);
    let mut w = v.to_dense(basis)?;
    let mut log_fact = 0.0;
    let mut growth = 0.0_f64;
    for n in 1..=terms {
        w = &m * w;
        let norm = gram_norm(basis, &w);
        if norm == 0.0 {
            return Ok(RadiusEstimate { terms: n, ..unbounded });
        }
        log_fact += (n as f64).ln();
        growth = growth.max(((norm.ln() - log_fact) / n as f64).exp());
    }
    if !u.body().has_conj_part() {
        return Ok(RadiusEstimate { growth, terms, ..unbounded });
    }
    Ok(RadiusEstimate {
        radius: if growth > 0.0 { 1.0 / growth } else { f64::INFINITY },
        growth,
        terms,
        truncation_limited: n_max > depth,
    })
}

/// Baker–Campbell–Hausdorff product of two even elements of the central
/// extension, truncated at `order ≤ 4`.
pub fn bch(y: &CentralElement, y2: &CentralElement, order: usize) -> Result<CentralElement> {
    if !(1..=4).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    if y.parity() != Parity::Even || y2.parity() != Parity::Even {
        return Err(Error::WrongParity { even: true });
    }
    let mut z = y.try_add(y2)?;
    if order >= 2 {
        let xy = extended_bracket(y, y2)?;
        z = z.try_add(&xy.scaled(0.5))?;
        if order >= 3 {
            let xxy = extended_bracket(y, &xy)?;
            let yyx = extended_bracket(y2, &xy.scaled(-1.0))?;
            z = z.try_add(&xxy.try_add(&yyx)?.scaled(1.0 / 12.0))?;
            if order >= 4 {
                let yxxy = extended_bracket(y2, &xxy)?;
                z = z.try_add(&yxxy.scaled(-1.0 / 24.0))?;
            }
        }
    }
    Ok(z)
}

/// `‖exp ρ(bch(εy, εy', order)) − exp ρ(εy) exp ρ(εy')‖` on degrees `≤ D−4`,
/// in orthonormal coordinates, for `y`, `y'` rescaled to unit norm.
pub fn bch_consistency_error(y: &OspElement, y2: &OspElement, eps: f64, order: usize, basis: &FockBasis) -> Result<f64> {
    require_interior(basis)?;
    let a = CentralElement::from(y.scaled(eps / y.norm()));
    let b = CentralElement::from(y2.scaled(eps / y2.norm()));
    let z = bch(&a, &b, order)?;
    let ez = expm(&rho_full_dense_unchecked(&z, basis));
    let ea = expm(&rho_full_dense(&a, basis)?);
    let eb = expm(&rho_full_dense(&b, basis)?);
    let diff = ez - mul(&ea, &eb);
    Ok(op_norm(&orthonormal_block(basis, &diff, basis.degree_cap() - 4)))
}

/// Observed order `log₂(err(ε₁)/err(ε₂))` for `ε₂ = ε₁/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BchSweep {
    pub eps: [f64; 2],
    pub errors: [f64; 2],
    pub slope: f64,
}

pub fn bch_sweep(y: &OspElement, y2: &OspElement, eps: f64, basis: &FockBasis) -> Result<BchSweep> {
    let e1 = bch_consistency_error(y, y2, eps, 4, basis)?;
    let e2 = bch_consistency_error(y, y2, eps / 2.0, 4, basis)?;
    Ok(BchSweep { eps: [eps, eps / 2.0], errors: [e1, e2], slope: (e1 / e2).log2() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub n: usize,
    /// Lower bound for `q_n(v)`.
    pub value: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Random direction `Σ c_j g_j / ‖Σ c_j g_j‖` in the unit ball spanned by
/// the family.
fn random_direction<R: Rng>(family: &[OspElement], rng: &mut R) -> Result<OspElement> {
    loop {
        let mut x = family[0].scaled(rng.sample(StandardNormal));
        for g in &family[1..] {
            x = x.try_add(&g.scaled(rng.sample(StandardNormal)))?;
        }
        let n = x.norm();
        if n > 1e-12 {
            return Ok(x.scaled(1.0 / n));
        }
    }
}

/// Monte-Carlo lower bound for `q_n(v) = sup ‖ρ(x₁)⋯ρ(x_n) v‖` over unit
/// directions from `family`.
///
/// Sample `i` draws from its own ChaCha stream `i` of `seed`, so a larger
/// sample count only adds candidates and the estimate never decreases.
pub fn seminorm_estimate(
    v: &FockVector,
    n: usize,
    samples: usize,
    seed: u64,
    family: &[OspElement],
    basis: &Arc<FockBasis>,
) -> Result<SeminormEstimate> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if family.iter().any(|g| g.parity() != Parity::Even) {
        return Err(Error::WrongParity { even: true });
    }
    let v0 = v.to_dense(basis)?;
    let base = SeminormEstimate { n, value: gram_norm(basis, &v0), samples, seed };
    if n == 0 || v.is_zero() {
        return Ok(base);
    }
    let value = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut w = v0.clone();
            for _ in 0..n {
                let x = random_direction(family, &mut rng)?;
                w = rho_full_dense(&CentralElement::from(x), basis)? * w;
            }
            Ok(gram_norm(basis, &w))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    Ok(SeminormEstimate { value, ..base })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Report-only comparison of `q_n(ρ(y)v)` with
/// `(1/(2√2))‖y‖ Σ_{k ≤ n+1} C(n+1,k) q_k(v)`, both as Monte-Carlo lower
/// bounds. The residual is `lhs − rhs`.
pub fn seminorm_chain_report(
    v: &FockVector,
    y: &OspElement,
    n: usize,
    samples: usize,
    seed: u64,
    family: &[OspElement],
    basis: &Arc<FockBasis>,
) -> Result<IdentityReport> {
    let my = rho_full_dense(&CentralElement::from(y.clone()), basis)?;
    let yv = FockVector::from_dense(basis, &(my * v.to_dense(basis)?));
    let lhs = seminorm_estimate(&yv, n, samples, seed, family, basis)?.value;
    let mut sum = 0.0;
    for k in 0..=n + 1 {
        sum += binomial(n + 1, k) * seminorm_estimate(v, k, samples, seed, family, basis)?.value;
    }
    let rhs = y.norm() * sum / (2.0 * std::f64::consts::SQRT_2);
    Ok(IdentityReport::report_only(format!("seminorm_chain[n={n}]"), lhs - rhs, basis.degree_cap())
        .with_note(format!("lhs = {lhs:?}, rhs = {rhs:?}; both sides are sampled lower bounds")))
}

/// `‖ρ(y)v‖ ≤ (1/√2)‖v‖^{½}‖ρ([y,y])v‖^{½}` for odd `y` and `v` of degree
/// `≤ D−4`. The residual is `lhs − rhs`, so passing means slack `≥ −1e-12`.
pub fn check_interpolation_bounds(v: &FockVector, y: &OspElement, basis: &FockBasis) -> Result<IdentityReport> {
    require_interior(basis)?;
    if y.parity() != Parity::Odd {
        return Err(Error::WrongParity { even: false });
    }
    let region = basis.degree_cap() - 4;
    if let Some(deg) = v.max_degree() {
        if deg > region {
            return Err(Error::OutsideSafeInterior { degree: deg, max: region });
        }
    }
    let u = CentralElement::from(y.clone());
    let my = rho_full_dense(&u, basis)?;
    let square = extended_bracket(&u, &u)?;
    let ms = rho_full_dense_unchecked(&square, basis);
    let v0 = v.to_dense(basis)?;
    let lhs = gram_norm(basis, &(my * &v0));
    let rhs = (gram_norm(basis, &v0) * gram_norm(basis, &(ms * &v0))).sqrt() / std::f64::consts::SQRT_2;
    Ok(IdentityReport::new("interpolation_bound", lhs - rhs, INTERPOLATION_SLACK, region)
        .with_note(format!("lhs = {lhs:?}, rhs = {rhs:?}")))
}
