//! Numerical certification of the pre-representation axioms on the safe
//! interior of a truncation.
//!
//! Matrices are compared in orthonormal coordinates (see
//! [`crate::fock::orthonormal_block`]). A single application of a
//! conjugate-linear part moves a vector up by at most two degrees, so
//! single-operator checks run on degrees `≤ D−2` and products of two
//! operators on degrees `≤ D−4`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{orthonormal_block, rho_full_dense_unchecked, rho_full_unchecked, FockBasis};
use crate::generators::{find_generator, Generator};
use crate::linalg::{c, expm, frobenius, max_abs, mul, CMatrix};
use crate::superalgebra::{
    adjoint_orbit, cocycle, exp_tail, extended_bracket, superbracket, CentralElement, OspElement, Parity,
    MEMBERSHIP_TOL,
};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const SQUARE_TOL: f64 = 1e-9;
pub const OFF_SCALAR_TOL: f64 = 1e-8;
pub const CONJUGACY_TOL: f64 = 1e-7;
pub const SERIES_TAIL_TOL: f64 = 1e-12;
pub const MAX_SERIES_TERMS: usize = 60;
pub const LINEARITY_TOL: f64 = 1e-10;
pub const CLOSURE_TOL: f64 = 1e-9;

/// Outcome of one numerical check.
///
/// `tolerance = None` marks a report-only measurement, which always passes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub check: String,
    pub residual: f64,
    pub tolerance: Option<f64>,
    pub safe_degree: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_scalar: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub off_scalar_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityReport {
    pub fn new(check: impl Into<String>, residual: f64, tolerance: f64, safe_degree: usize) -> Self {
        Self {
            check: check.into(),
            residual,
            tolerance: Some(tolerance),
            safe_degree,
            pass: residual <= tolerance,
            fitted_scalar: None,
            off_scalar_residual: None,
            note: None,
        }
    }

    pub fn report_only(check: impl Into<String>, residual: f64, safe_degree: usize) -> Self {
        Self {
            check: check.into(),
            residual,
            tolerance: None,
            safe_degree,
            pass: true,
            fitted_scalar: None,
            off_scalar_residual: None,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub(crate) fn require_interior(basis: &FockBasis) -> Result<()> {
    if basis.degree_cap() < 6 {
        return Err(Error::NoSafeInterior { degree_cap: basis.degree_cap() });
    }
    Ok(())
}

fn scale_of(m: &CMatrix) -> f64 {
    max_abs(m).max(1.0)
}

/// `max|M + M^H|` relative to the entry scale, on degrees `≤ max_degree`.
pub fn skew_hermitian_residual(basis: &FockBasis, m: &CMatrix, max_degree: usize) -> f64 {
    let b = orthonormal_block(basis, m, max_degree);
    max_abs(&(&b + b.adjoint())) / scale_of(&b)
}

/// `max|N − N^H|` for `N = e^{−iπ/4} M`, relative, on degrees `≤ max_degree`.
pub fn odd_hermitian_residual(basis: &FockBasis, m: &CMatrix, max_degree: usize) -> f64 {
    let phase = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
    let b = orthonormal_block(basis, m, max_degree) * phase;
    max_abs(&(&b - b.adjoint())) / scale_of(&b)
}

/// Scalar part of the super-commutator defect `[ρ(u), ρ(u')] − ρ([u,u'])`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorDefect {
    /// Fitted scalar `c = tr(defect)/dim` on the interior block.
    pub scalar: Complex64,
    /// `ω(T, T')` of the two bodies.
    pub omega: f64,
    /// `‖defect − c·Id‖_F / max(1, ‖[ρ(u), ρ(u')]‖_F)` on the block.
    pub off_scalar: f64,
}

impl CommutatorDefect {
    /// `c / (iω)`; undefined when `ω` vanishes.
    pub fn kappa(&self) -> Option<Complex64> {
        if self.omega.abs() < 1e-12 {
            None
        } else {
            Some(self.scalar / (c(0.0, 1.0) * self.omega))
        }
    }
}

fn supercommutator(a: &CMatrix, b: &CMatrix, pa: Parity, pb: Parity) -> CMatrix {
    mul(a, b) - mul(b, a) * Complex64::new(pa.koszul(pb), 0.0)
}

fn defect_from_dense(
    basis: &FockBasis,
    u: &CentralElement,
    v: &CentralElement,
    mu: &CMatrix,
    mv: &CMatrix,
    m_bracket: &CMatrix,
) -> CommutatorDefect {
    let region = basis.degree_cap() - 4;
    let comm = supercommutator(mu, mv, u.parity(), v.parity());
    let comm_block = orthonormal_block(basis, &comm, region);
    let defect = &comm_block - orthonormal_block(basis, m_bracket, region);
    let n = defect.nrows();
    let scalar = defect.trace() / n as f64;
    let off = frobenius(&(&defect - CMatrix::identity(n, n) * scalar));
    CommutatorDefect {
        scalar,
        omega: cocycle(u.body(), v.body()),
        off_scalar: off / frobenius(&comm_block).max(1.0),
    }
}

/// Super-commutator defect on degrees `≤ D−4`, where `ρ([T,T'])` carries no
/// central term.
pub fn commutator_defect(u: &CentralElement, v: &CentralElement, basis: &FockBasis) -> Result<CommutatorDefect> {
    require_interior(basis)?;
    let mu = crate::fock::rho_full_dense(u, basis)?;
    let mv = crate::fock::rho_full_dense(v, basis)?;
    let bracket = CentralElement::from(superbracket(u.body(), v.body())?);
    let mb = rho_full_dense_unchecked(&bracket, basis);
    Ok(defect_from_dense(basis, u, v, &mu, &mv, &mb))
}

/// `ρ(u)² − ρ(½[u,u])` relative residual on degrees `≤ D−4` for odd `u`.
fn odd_square_residual(basis: &FockBasis, u: &CentralElement, mu: &CMatrix) -> Result<f64> {
    let half = extended_bracket(u, u)?.scaled(0.5);
    let mh = rho_full_dense_unchecked(&half, basis);
    let region = basis.degree_cap() - 4;
    let lhs = orthonormal_block(basis, &mul(mu, mu), region);
    let rhs = orthonormal_block(basis, &mh, region);
    Ok(max_abs(&(&lhs - &rhs)) / scale_of(&rhs))
}

fn single_element_reports(
    basis: &FockBasis,
    label: &str,
    u: &CentralElement,
    mu: &CMatrix,
) -> Result<Vec<IdentityReport>> {
    let single = basis.degree_cap() - 2;
    let double = basis.degree_cap() - 4;
    let mut out = Vec::new();
    match u.parity() {
        Parity::Even => {
            out.push(IdentityReport::new(
                format!("skew_hermitian[{label}]"),
                skew_hermitian_residual(basis, mu, single),
                HERMITIAN_TOL,
                single,
            ));
        }
        Parity::Odd => {
            out.push(IdentityReport::new(
                format!("odd_hermitian[{label}]"),
                odd_hermitian_residual(basis, mu, single),
                HERMITIAN_TOL,
                single,
            ));
            out.push(IdentityReport::new(
                format!("odd_square[{label}]"),
                odd_square_residual(basis, u, mu)?,
                SQUARE_TOL,
                double,
            ));
        }
    }
    Ok(out)
}

fn defect_reports(label: &str, d: &CommutatorDefect, safe_degree: usize) -> Vec<IdentityReport> {
    let mut scalar = IdentityReport::new(format!("commutator_scalar[{label}]"), d.off_scalar, OFF_SCALAR_TOL, safe_degree);
    scalar.fitted_scalar = Some([d.scalar.re, d.scalar.im]);
    scalar.off_scalar_residual = Some(d.off_scalar);
    let expected = c(0.0, d.omega);
    let mismatch = (d.scalar - expected).norm();
    let mut cocycle = IdentityReport::new(
        format!("cocycle_match[{label}]"),
        mismatch,
        OFF_SCALAR_TOL * d.omega.abs().max(1.0),
        safe_degree,
    );
    cocycle.fitted_scalar = Some([d.scalar.re, d.scalar.im]);
    if let Some(k) = d.kappa() {
        cocycle.note = Some(format!("kappa = {:?} + {:?}i", k.re, k.im));
    }
    vec![scalar, cocycle]
}

/// Identity suite for a pair of certified central elements.
pub fn verify_identities(u: &CentralElement, v: &CentralElement, basis: &FockBasis) -> Result<Vec<IdentityReport>> {
    require_interior(basis)?;
    let mu = crate::fock::rho_full_dense(u, basis)?;
    let mv = crate::fock::rho_full_dense(v, basis)?;
    let mut out = single_element_reports(basis, "u", u, &mu)?;
    out.extend(single_element_reports(basis, "u'", v, &mv)?);
    let bracket = CentralElement::from(superbracket(u.body(), v.body())?);
    let mb = rho_full_dense_unchecked(&bracket, basis);
    let d = defect_from_dense(basis, u, v, &mu, &mv, &mb);
    out.extend(defect_reports("u,u'", &d, basis.degree_cap() - 4));
    Ok(out)
}

fn worst(check: &str, items: impl IntoIterator<Item = (String, f64)>, tol: f64, safe_degree: usize) -> IdentityReport {
    let mut max = 0.0_f64;
    let mut arg = String::new();
    for (name, r) in items {
        if r > max || r.is_nan() {
            max = r;
            arg = name;
        }
    }
    let r = IdentityReport::new(check, max, tol, safe_degree);
    if arg.is_empty() {
        r
    } else {
        r.with_note(format!("worst: {arg}"))
    }
}

/// Checks the pre-representation axioms for a family of generators.
///
/// Generators are not required to be certified: a generator outside 𝔬𝔰𝔭 is
/// still represented and simply fails the membership and axiom checks.
pub fn check_prerep(gens: &[Generator], basis: &Arc<FockBasis>, seed: u64) -> Result<Vec<IdentityReport>> {
    require_interior(basis)?;
    if gens.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let cap = basis.degree_cap();
    let (single, double) = (cap - 2, cap - 4);
    let mats: Vec<CMatrix> = gens.par_iter().map(|g| rho_full_dense_unchecked(&g.element, basis)).collect();

    let mut out = vec![IdentityReport::new("axiom_i_ii_structure", 0.0, 0.0, cap)
        .with_note("graded Fock space; truncated operators are everywhere defined")];

    out.push(worst(
        "membership",
        gens.iter().map(|g| (g.name.clone(), g.element.body().residual())),
        MEMBERSHIP_TOL,
        cap,
    ));

    // (iii) linearity on random same-parity combinations.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lin_items = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let members: Vec<usize> = (0..gens.len()).filter(|&i| gens[i].element.parity() == parity).collect();
        if members.is_empty() {
            continue;
        }
        for trial in 0..4 {
            let coeffs: Vec<f64> = members.iter().map(|_| StandardNormal.sample(&mut rng)).collect();
            let mut combo = gens[members[0]].element.scaled(coeffs[0]);
            let mut expected = &mats[members[0]] * Complex64::new(coeffs[0], 0.0);
            for (&i, &w) in members.iter().zip(&coeffs).skip(1) {
                combo = combo.try_add(&gens[i].element.scaled(w))?;
                expected += &mats[i] * Complex64::new(w, 0.0);
            }
            let got = rho_full_dense_unchecked(&combo, basis);
            let r = max_abs(&(&got - &expected)) / scale_of(&expected);
            lin_items.push((format!("{parity:?} combination {trial}"), r));
        }
    }
    out.push(worst("axiom_iii_linearity", lin_items, LINEARITY_TOL, cap));

    // (iii) bracket compatibility over all generator pairs.
    let pairs: Vec<(usize, usize)> = (0..gens.len()).flat_map(|i| (i..gens.len()).map(move |j| (i, j))).collect();
    let defects: Vec<(String, f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (u, v) = (&gens[i].element, &gens[j].element);
            let label = format!("{},{}", gens[i].name, gens[j].name);
            match superbracket(u.body(), v.body()) {
                Ok(b) => {
                    let mb = rho_full_dense_unchecked(&CentralElement::from(b), basis);
                    let d = defect_from_dense(basis, u, v, &mats[i], &mats[j], &mb);
                    let mismatch = (d.scalar - c(0.0, d.omega)).norm() / d.omega.abs().max(1.0);
                    (label, d.off_scalar, mismatch)
                }
                Err(_) => (label, f64::INFINITY, f64::INFINITY),
            }
        })
        .collect();
    out.push(worst(
        "axiom_iii_bracket_scalar_defect",
        defects.iter().map(|(l, off, _)| (l.clone(), *off)),
        OFF_SCALAR_TOL,
        double,
    ));
    out.push(worst(
        "axiom_iii_cocycle_match",
        defects.iter().map(|(l, _, m)| (l.clone(), *m)),
        OFF_SCALAR_TOL,
        double,
    ));

    // (iv) and (v).
    let evens: Vec<(String, f64)> = gens
        .iter()
        .zip(&mats)
        .filter(|(g, _)| g.element.parity() == Parity::Even)
        .map(|(g, m)| (g.name.clone(), skew_hermitian_residual(basis, m, single)))
        .collect();
    let odds: Vec<(String, f64)> = gens
        .iter()
        .zip(&mats)
        .filter(|(g, _)| g.element.parity() == Parity::Odd)
        .map(|(g, m)| (g.name.clone(), odd_hermitian_residual(basis, m, single)))
        .collect();
    if !evens.is_empty() {
        out.push(worst("axiom_iv_skew_adjoint", evens, HERMITIAN_TOL, single));
    }
    if !odds.is_empty() {
        out.push(worst("axiom_v_odd_symmetric", odds, HERMITIAN_TOL, single));
        let squares: Vec<(String, f64)> = gens
            .iter()
            .zip(&mats)
            .filter(|(g, _)| g.element.parity() == Parity::Odd)
            .map(|(g, m)| {
                let r = odd_square_residual(basis, &g.element, m).unwrap_or(f64::INFINITY);
                (g.name.clone(), r)
            })
            .collect();
        out.push(worst("odd_square_relation", squares, SQUARE_TOL, double));
    }
    out.push(
        IdentityReport::new("axiom_vi_group_compatibility", 0.0, 0.0, cap)
            .with_note("skipped: connected case, the condition holds trivially"),
    );
    Ok(out)
}

/// Number of adjoint-series terms needed for a tail bound `≤ 1e-12`.
pub fn conjugacy_terms(x: &OspElement, ty: &OspElement) -> Result<usize> {
    let a = ty.norm();
    let scale = x.norm().max(f64::MIN_POSITIVE);
    for n in 0..=MAX_SERIES_TERMS {
        if exp_tail(a, n) * scale <= SERIES_TAIL_TOL {
            return Ok(n);
        }
    }
    Err(Error::SeriesTooLarge { norm: a, max_terms: MAX_SERIES_TERMS })
}

/// `E ρ(x) E⁻¹ − ρ(e^{ad_{ty}} x)` with `E = exp(tρ(y))`, as a relative
/// max-abs residual on degrees `≤ region`.
pub fn conjugacy_residual(x: &OspElement, y: &OspElement, t: f64, basis: &FockBasis, region: usize) -> Result<f64> {
    if x.parity() != Parity::Odd {
        return Err(Error::WrongParity { even: false });
    }
    if y.parity() != Parity::Even {
        return Err(Error::WrongParity { even: true });
    }
    x.ensure_certified()?;
    y.ensure_certified()?;
    let ty = y.scaled(t);
    let n = conjugacy_terms(x, &ty)?;
    let orbit = adjoint_orbit(&ty, x, n)?;
    let my = rho_full_dense_unchecked(&CentralElement::from(ty), basis);
    let mx = rho_full_dense_unchecked(&CentralElement::from(x.clone()), basis);
    let e = expm(&my);
    let e_inv = expm(&(-&my));
    let lhs = orthonormal_block(basis, &mul(&mul(&e, &mx), &e_inv), region);
    let rhs = orthonormal_block(basis, &rho_full_dense_unchecked(&CentralElement::from(orbit.value), basis), region);
    Ok(max_abs(&(&lhs - &rhs)) / scale_of(&rhs))
}

/// Conjugacy invariance of the odd representative on degrees `≤ D−4`.
pub fn check_conjugacy(x: &OspElement, y: &OspElement, t: f64, basis: &FockBasis) -> Result<IdentityReport> {
    require_interior(basis)?;
    let region = basis.degree_cap() - 4;
    let r = conjugacy_residual(x, y, t, basis, region)?;
    Ok(IdentityReport::new("conjugacy", r, CONJUGACY_TOL, region))
}

/// Compares the conjugacy residual at caps `D` and `D+2` on the fixed region
/// `≤ D−4`; passes when the finer truncation is strictly better.
pub fn check_conjugacy_refinement(x: &OspElement, y: &OspElement, t: f64, degree_cap: usize) -> Result<IdentityReport> {
    let coarse = FockBasis::new(*x.space(), degree_cap)?;
    require_interior(&coarse)?;
    let fine = FockBasis::new(*x.space(), degree_cap + 2)?;
    let region = degree_cap - 4;
    let r0 = conjugacy_residual(x, y, t, &coarse, region)?;
    let r1 = conjugacy_residual(x, y, t, &fine, region)?;
    let mut rep = IdentityReport::report_only("conjugacy_refinement", r1, region);
    rep.tolerance = Some(r0);
    rep.pass = r1 < r0;
    Ok(rep.with_note(format!("residual at D = {degree_cap}: {r0:?}; at D = {}: {r1:?}", degree_cap + 2)))
}

fn vectorize(u: &CentralElement) -> Vec<f64> {
    let x = u.body();
    let mut v = Vec::new();
    for m in [x.lin(), x.conj_part()] {
        v.extend(m.iter().map(|z| z.re));
        v.extend(m.iter().map(|z| z.im));
    }
    v.push(u.z());
    v
}

/// Distance from `target` to the span of `basis_vecs`, relative to `‖target‖`.
fn span_residual(q: &[Vec<f64>], target: &[f64]) -> f64 {
    let mut r = target.to_vec();
    for _ in 0..2 {
        for e in q {
            let dot: f64 = e.iter().zip(&r).map(|(a, b)| a * b).sum();
            for (ri, ei) in r.iter_mut().zip(e) {
                *ri -= dot * ei;
            }
        }
    }
    let nt = target.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nr = r.iter().map(|a| a * a).sum::<f64>().sqrt();
    nr / nt.max(1.0)
}

fn orthonormalize(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for e in &q {
                let dot: f64 = e.iter().zip(&r).map(|(a, b)| a * b).sum();
                for (ri, ei) in r.iter_mut().zip(e) {
                    *ri -= dot * ei;
                }
            }
        }
        let n = r.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-10 {
            q.push(r.into_iter().map(|a| a / n).collect());
        }
    }
    q
}

/// A restricted generator family and its re-run axiom checks.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub generators: Vec<Generator>,
    pub reports: Vec<IdentityReport>,
}

/// Restricts the family to the named sub-collection after checking that its
/// real span is closed under the extended bracket.
///
/// The restricted generators act through the same Fock matrices as in the
/// full family; a `literal_restriction` report compares their serialized
/// sparse triplets byte for byte.
pub fn restrict(family: &[Generator], selection: &[&str], basis: &Arc<FockBasis>, seed: u64) -> Result<Restriction> {
    if selection.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let chosen: Vec<Generator> = selection.iter().map(|n| find_generator(family, n)).collect::<Result<_>>()?;
    let q = orthonormalize(&chosen.iter().map(|g| vectorize(&g.element)).collect::<Vec<_>>());
    for (i, gi) in chosen.iter().enumerate() {
        for gj in &chosen[i..] {
            let b = extended_bracket(&gi.element, &gj.element)?;
            let r = span_residual(&q, &vectorize(&b));
            if r > CLOSURE_TOL {
                return Err(Error::NotClosed { left: gi.name.clone(), right: gj.name.clone(), residual: r });
            }
        }
    }
    let mut reports = check_prerep(&chosen, basis, seed)?;
    let mismatches: Vec<String> = chosen
        .iter()
        .filter(|g| {
            let parent = family.iter().find(|p| p.name == g.name).expect("selected from family");
            rho_full_unchecked(&g.element, basis).to_triplet_text()
                != rho_full_unchecked(&parent.element, basis).to_triplet_text()
        })
        .map(|g| g.name.clone())
        .collect();
    let mut lit = IdentityReport::new("literal_restriction", mismatches.len() as f64, 0.0, basis.degree_cap());
    if !mismatches.is_empty() {
        lit.note = Some(format!("differing matrices: {}", mismatches.join(", ")));
    }
    reports.push(lit);
    Ok(Restriction { generators: chosen, reports })
}
