//! Truncated restricted orthosymplectic superalgebra.
//!
//! The graded space 𝒦 = 𝒦₀ ⊕ 𝒦₁ is truncated to `m_f` fermionic modes
//! (basis f₁…f_{m_f} of 𝒦₀) followed by `m_b` bosonic modes (basis
//! b₁…b_{m_b} of 𝒦₁). A real-linear operator is stored as the pair
//! `(lin, conj)` acting by `v ↦ lin·v + conj·v̄`.
//!
//! Membership in 𝔬𝔰𝔭 is the condition
//! `(Tv, w) + (-1)^{p(T)p(v)} (v, Tw) = 0` for the real bilinear form that is
//! `Re⟨·,·⟩` on 𝒦₀, `Im⟨·,·⟩` on 𝒦₁ and zero across the two parts. The
//! Hermitian product is conjugate-linear in its first argument.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{conj, frobenius, op_norm, CMatrix, CVector, I};

/// Tolerance for certified membership in the orthosymplectic superalgebra.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Relative tolerance for algebraic identities (Jacobi, cocycle).
pub const IDENTITY_TOL: f64 = 1e-9;

/// Factor turning `‖·‖'` into a norm with `‖[x,y]‖ ≤ ‖x‖·‖y‖`.
///
/// `‖·‖'` is submultiplicative under composition (the antilinear part's
/// operator norm is at most its Frobenius norm), so a superbracket at most
/// doubles it.
pub const NORM_SCALE: f64 = 2.0;

const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Parity of a product or bracket.
    pub fn plus(self, other: Parity) -> Parity {
        Parity::from_bit((self.bit() + other.bit()) as usize)
    }

    /// Koszul sign `(-1)^{p q}`.
    pub fn koszul(self, other: Parity) -> f64 {
        if self == Parity::Odd && other == Parity::Odd {
            -1.0
        } else {
            1.0
        }
    }
}

/// The truncated graded space 𝒦 with `m_f` fermionic and `m_b` bosonic modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncatedSpace {
    m_f: usize,
    m_b: usize,
}

impl TruncatedSpace {
    pub fn new(m_f: usize, m_b: usize) -> Result<Self> {
        if m_f == 0 || m_b == 0 {
            return Err(Error::InvalidSpace { m_f, m_b });
        }
        Ok(Self { m_f, m_b })
    }

    pub fn m_f(&self) -> usize {
        self.m_f
    }

    pub fn m_b(&self) -> usize {
        self.m_b
    }

    /// Complex dimension `m_f + m_b`.
    pub fn dim(&self) -> usize {
        self.m_f + self.m_b
    }

    pub fn is_fermionic(&self, index: usize) -> bool {
        index < self.m_f
    }

    /// Parity of the basis vector at `index` (fermionic modes are even).
    pub fn parity_of(&self, index: usize) -> Parity {
        if self.is_fermionic(index) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Index of `f_r` (1-based mode number).
    pub fn fermion(&self, r: usize) -> usize {
        assert!(r >= 1 && r <= self.m_f, "fermionic mode {r} out of range");
        r - 1
    }

    /// Index of `b_r` (1-based mode number).
    pub fn boson(&self, r: usize) -> usize {
        assert!(r >= 1 && r <= self.m_b, "bosonic mode {r} out of range");
        self.m_f + r - 1
    }

    pub fn basis_vector(&self, index: usize) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[index] = Complex64::new(1.0, 0.0);
        v
    }

    /// ⟨v, w⟩, conjugate-linear in `v`.
    pub fn inner(&self, v: &CVector, w: &CVector) -> Complex64 {
        v.dotc(w)
    }

    /// The orthosymplectic real bilinear form `(v, w)`.
    pub fn form(&self, v: &CVector, w: &CVector) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.dim() {
            let z = v[j].conj() * w[j];
            acc += if self.is_fermionic(j) { z.re } else { z.im };
        }
        acc
    }

    /// J₋: multiplication by -i on 𝒦₀ and by +i on 𝒦₁.
    pub fn j_minus(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i != j {
                Complex64::new(0.0, 0.0)
            } else if self.is_fermionic(i) {
                -I
            } else {
                I
            }
        })
    }

    /// True when `(row, col)` lies in a block that an operator of `parity` may occupy.
    fn block_allowed(&self, parity: Parity, row: usize, col: usize) -> bool {
        let same = self.is_fermionic(row) == self.is_fermionic(col);
        match parity {
            Parity::Even => same,
            Parity::Odd => !same,
        }
    }
}

/// A real-linear operator `v ↦ lin·v + conj·v̄` on 𝒦.
#[derive(Clone, Debug, PartialEq)]
pub struct RealLinearOperator {
    lin: CMatrix,
    conj: CMatrix,
}

impl RealLinearOperator {
    pub fn new(lin: CMatrix, conj: CMatrix) -> Result<Self> {
        let d = lin.nrows();
        if lin.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: lin.ncols() });
        }
        if conj.nrows() != d || conj.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: conj.nrows().max(conj.ncols()) });
        }
        Ok(Self { lin, conj })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { lin: CMatrix::zeros(dim, dim), conj: CMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.lin.nrows()
    }

    /// The ℂ-linear part `T_lin`.
    pub fn lin(&self) -> &CMatrix {
        &self.lin
    }

    /// Matrix of the ℂ-conjugate-linear part `T_conj`, i.e. `T_conj v = conj·v̄`.
    pub fn conj_part(&self) -> &CMatrix {
        &self.conj
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.lin * v + &self.conj * v.map(|z| z.conj())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            lin: &self.lin * &other.lin + &self.conj * conj(&other.conj),
            conj: &self.lin * &other.conj + &self.conj * conj(&other.lin),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { lin: &self.lin + &other.lin, conj: &self.conj + &other.conj }
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self { lin: &self.lin - &other.lin, conj: &self.conj - &other.conj }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { lin: self.lin.scale(s), conj: self.conj.scale(s) }
    }

    /// Matrix of the operator on the underlying real space, in coordinates
    /// `(Re v₁ … Re v_d, Im v₁ … Im v_d)`.
    pub fn to_real_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let (ar, ai) = (self.lin.map(|z| z.re), self.lin.map(|z| z.im));
        let (br, bi) = (self.conj.map(|z| z.re), self.conj.map(|z| z.im));
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        m.view_mut((0, 0), (d, d)).copy_from(&(&ar + &br));
        m.view_mut((0, d), (d, d)).copy_from(&(&bi - &ai));
        m.view_mut((d, 0), (d, d)).copy_from(&(&ai + &bi));
        m.view_mut((d, d), (d, d)).copy_from(&(&ar - &br));
        m
    }
}

/// Splits a real-linear operator, given by its real matrix in coordinates
/// `(Re v, Im v)`, into `T_lin = ½(T − J₊TJ₊)` and `T_conj = ½(T + J₊TJ₊)`.
pub fn decompose(space: &TruncatedSpace, real_matrix: &DMatrix<f64>) -> Result<RealLinearOperator> {
    let d = space.dim();
    if real_matrix.nrows() != 2 * d || real_matrix.ncols() != 2 * d {
        return Err(Error::DimensionMismatch {
            expected: 2 * d,
            got: real_matrix.nrows().max(real_matrix.ncols()),
        });
    }
    // J₊ in real coordinates is [[0, -1], [1, 0]].
    let mut jp = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for k in 0..d {
        jp[(k, d + k)] = -1.0;
        jp[(d + k, k)] = 1.0;
    }
    let jtj = &jp * real_matrix * &jp;
    let lin_real = (real_matrix - &jtj) * 0.5;
    let conj_real = (real_matrix + &jtj) * 0.5;
    // A ℂ-linear map has real matrix [[Ar, -Ai], [Ai, Ar]]; v ↦ B v̄ has [[Br, Bi], [Bi, -Br]].
    let lin = CMatrix::from_fn(d, d, |i, j| Complex64::new(lin_real[(i, j)], lin_real[(d + i, j)]));
    let conj_m = CMatrix::from_fn(d, d, |i, j| Complex64::new(conj_real[(i, j)], conj_real[(d + i, j)]));
    RealLinearOperator::new(lin, conj_m)
}

/// A parity-homogeneous element of the truncated 𝔬𝔰𝔭 together with its
/// orthosymplectic defect.
#[derive(Clone, Debug, PartialEq)]
pub struct OspElement {
    space: TruncatedSpace,
    op: RealLinearOperator,
    parity: Parity,
    residual: f64,
}

impl OspElement {
    /// Wraps `op`, checking that its blocks match `parity`. The residual is
    /// recorded, not enforced; see [`OspElement::is_certified`].
    pub fn new(space: TruncatedSpace, op: RealLinearOperator, parity: Parity) -> Result<Self> {
        let d = space.dim();
        if op.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: op.dim() });
        }
        let scale = 1.0 + crate::linalg::max_abs(op.lin()).max(crate::linalg::max_abs(op.conj_part()));
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                if !space.block_allowed(parity, i, j) {
                    worst = worst.max(op.lin[(i, j)].norm()).max(op.conj[(i, j)].norm());
                }
            }
        }
        if worst > STRUCTURE_TOL * scale {
            return Err(Error::ParityMismatch { magnitude: worst });
        }
        let residual = residual_of(&space, &op, parity);
        Ok(Self { space, op, parity, residual })
    }

    pub fn zero(space: TruncatedSpace, parity: Parity) -> Self {
        Self { space, op: RealLinearOperator::zeros(space.dim()), parity, residual: 0.0 }
    }

    pub fn space(&self) -> &TruncatedSpace {
        &self.space
    }

    pub fn op(&self) -> &RealLinearOperator {
        &self.op
    }

    pub fn lin(&self) -> &CMatrix {
        self.op.lin()
    }

    pub fn conj_part(&self) -> &CMatrix {
        self.op.conj_part()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn is_certified(&self) -> bool {
        self.residual <= MEMBERSHIP_TOL
    }

    pub fn ensure_certified(&self) -> Result<()> {
        if self.is_certified() {
            Ok(())
        } else {
            Err(Error::NotCertified { residual: self.residual, tolerance: MEMBERSHIP_TOL })
        }
    }

    /// Scaled norm satisfying `‖[x,y]‖ ≤ ‖x‖·‖y‖`.
    pub fn norm(&self) -> f64 {
        NORM_SCALE * osp_norm(self)
    }

    pub fn has_conj_part(&self) -> bool {
        self.op.conj.iter().any(|z| *z != Complex64::new(0.0, 0.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            space: self.space,
            op: self.op.scaled(s),
            parity: self.parity,
            residual: self.residual * s.abs(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.parity != other.parity {
            return Err(Error::WrongParity { even: self.parity == Parity::Even });
        }
        let op = self.op.plus(&other.op);
        let residual = residual_of(&self.space, &op, self.parity);
        Ok(Self { space: self.space, op, parity: self.parity, residual })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scaled(-1.0))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), got: other.space.dim() });
        }
        Ok(())
    }
}

fn residual_of(space: &TruncatedSpace, op: &RealLinearOperator, parity: Parity) -> f64 {
    let d = space.dim();
    // Real basis {e_j, i e_j}.
    let basis: Vec<(CVector, Parity)> = (0..d)
        .flat_map(|j| {
            let e = space.basis_vector(j);
            let ie = e.map(|z| z * I);
            [(e, space.parity_of(j)), (ie, space.parity_of(j))]
        })
        .collect();
    let images: Vec<CVector> = basis.iter().map(|(v, _)| op.apply(v)).collect();
    let mut worst = 0.0_f64;
    for (a, (v, pv)) in basis.iter().enumerate() {
        for (b, (w, _)) in basis.iter().enumerate() {
            let defect = space.form(&images[a], w) + parity.koszul(*pv) * space.form(v, &images[b]);
            worst = worst.max(defect.abs());
        }
    }
    worst
}

/// Max-abs orthosymplectic defect over all ordered pairs of real basis vectors.
pub fn osp_residual(x: &OspElement) -> f64 {
    residual_of(&x.space, &x.op, x.parity)
}

/// Frobenius-nearest element of the truncated 𝔬𝔰𝔭 with the given parity.
pub fn project_to_osp(space: &TruncatedSpace, op: &RealLinearOperator, parity: Parity) -> Result<OspElement> {
    let d = space.dim();
    if op.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: op.dim() });
    }
    let (mf, mb) = (space.m_f(), space.m_b());
    let a = op.lin();
    let b = op.conj_part();
    let mut lin = CMatrix::zeros(d, d);
    let mut cj = CMatrix::zeros(d, d);
    match parity {
        Parity::Even => {
            // lin skew-Hermitian on both blocks; conj antisymmetric on 𝒦₀, symmetric on 𝒦₁.
            for (off, m) in [(0, mf), (mf, mb)] {
                let ab = a.view((off, off), (m, m));
                let bb = b.view((off, off), (m, m));
                let skew = (ab - ab.adjoint()) * Complex64::new(0.5, 0.0);
                let sign = if off == 0 { -1.0 } else { 1.0 };
                let sym = (bb + bb.transpose() * Complex64::new(sign, 0.0)) * Complex64::new(0.5, 0.0);
                lin.view_mut((off, off), (m, m)).copy_from(&skew);
                cj.view_mut((off, off), (m, m)).copy_from(&sym);
            }
        }
        Parity::Odd => {
            // lin[b,f] = X, lin[f,b] = i X^H; conj[b,f] = Y, conj[f,b] = -i Y^T.
            let a10 = a.view((mf, 0), (mb, mf));
            let a01 = a.view((0, mf), (mf, mb));
            let x = (a10 + a01.adjoint() * I) * Complex64::new(0.5, 0.0);
            let b10 = b.view((mf, 0), (mb, mf));
            let b01 = b.view((0, mf), (mf, mb));
            let y = (b10 + b01.transpose() * I) * Complex64::new(0.5, 0.0);
            lin.view_mut((0, mf), (mf, mb)).copy_from(&(x.adjoint() * I));
            cj.view_mut((0, mf), (mf, mb)).copy_from(&(y.transpose() * -I));
            lin.view_mut((mf, 0), (mb, mf)).copy_from(&x);
            cj.view_mut((mf, 0), (mb, mf)).copy_from(&y);
        }
    }
    OspElement::new(*space, RealLinearOperator::new(lin, cj)?, parity)
}

/// `[x, y] = xy − (−1)^{p(x)p(y)} yx`.
pub fn superbracket(x: &OspElement, y: &OspElement) -> Result<OspElement> {
    x.check_compatible(y)?;
    let xy = x.op.compose(&y.op);
    let yx = y.op.compose(&x.op);
    let op = xy.minus(&yx.scaled(x.parity.koszul(y.parity)));
    OspElement::new(x.space, op, x.parity.plus(y.parity))
}

/// `‖T‖' = ‖T_lin‖_Op + ‖T_conj‖_HS`, the Hilbert–Schmidt norm taken over the
/// underlying real space (√2 times the complex Frobenius norm).
pub fn osp_norm(x: &OspElement) -> f64 {
    op_norm(x.lin()) + std::f64::consts::SQRT_2 * frobenius(x.conj_part())
}

/// The 2-cocycle `ω(x, y) = −½ tr_ℝ(J₋ x_conj y_conj)` on same-parity pairs
/// and zero otherwise. The real trace of a ℂ-linear map is `2·Re tr_ℂ`.
pub fn cocycle(x: &OspElement, y: &OspElement) -> f64 {
    if x.parity != y.parity || x.space != y.space {
        return 0.0;
    }
    // x_conj ∘ y_conj : v ↦ Bx · conj(By · v̄) = Bx · B̄y · v
    let composite = x.space.j_minus() * x.conj_part() * conj(y.conj_part());
    -composite.trace().re
}

/// `‖Σ_cyc (−1)^{p(x)p(z)}[x,[y,z]]‖' / (‖x‖'‖y‖'‖z‖')`.
pub fn jacobi_residual(x: &OspElement, y: &OspElement, z: &OspElement) -> Result<f64> {
    let (px, py, pz) = (x.parity, y.parity, z.parity);
    let t1 = superbracket(x, &superbracket(y, z)?)?.scaled(px.koszul(pz));
    let t2 = superbracket(y, &superbracket(z, x)?)?.scaled(py.koszul(px));
    let t3 = superbracket(z, &superbracket(x, y)?)?.scaled(pz.koszul(py));
    let sum = t1.try_add(&t2)?.try_add(&t3)?;
    let scale = osp_norm(x) * osp_norm(y) * osp_norm(z);
    Ok(osp_norm(&sum) / scale.max(f64::MIN_POSITIVE))
}

/// `|Σ_cyc (−1)^{p(x)p(z)} ω(x,[y,z])|` relative to `max(1, ‖x‖'‖y‖'‖z‖')`.
pub fn cocycle_identity_residual(x: &OspElement, y: &OspElement, z: &OspElement) -> Result<f64> {
    let (px, py, pz) = (x.parity, y.parity, z.parity);
    let w = px.koszul(pz) * cocycle(x, &superbracket(y, z)?)
        + py.koszul(px) * cocycle(y, &superbracket(z, x)?)
        + pz.koszul(py) * cocycle(z, &superbracket(x, y)?);
    Ok(w.abs() / (osp_norm(x) * osp_norm(y) * osp_norm(z)).max(1.0))
}

/// An element `(T, z)` of the central extension.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralElement {
    body: OspElement,
    z: f64,
}

impl CentralElement {
    pub fn new(body: OspElement, z: f64) -> Result<Self> {
        if body.parity() == Parity::Odd && z != 0.0 {
            return Err(Error::OddCentralCoordinate { z });
        }
        Ok(Self { body, z })
    }

    /// The pure central element `(0, z)`.
    pub fn central(space: TruncatedSpace, z: f64) -> Self {
        Self { body: OspElement::zero(space, Parity::Even), z }
    }

    pub fn body(&self) -> &OspElement {
        &self.body
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn parity(&self) -> Parity {
        self.body.parity()
    }

    pub fn space(&self) -> &TruncatedSpace {
        self.body.space()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { body: self.body.scaled(s), z: self.z * s }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self { body: self.body.try_add(&other.body)?, z: self.z + other.z })
    }
}

impl From<OspElement> for CentralElement {
    fn from(body: OspElement) -> Self {
        Self { body, z: 0.0 }
    }
}

/// `[(T,z), (T',z')] = ([T,T'], ω(T,T'))`.
pub fn extended_bracket(u: &CentralElement, v: &CentralElement) -> Result<CentralElement> {
    let body = superbracket(&u.body, &v.body)?;
    let z = cocycle(&u.body, &v.body);
    Ok(CentralElement { body, z })
}

/// Partial sum of `e^{ad_y} x` with a tail bound from `‖ad_y^n x‖ ≤ ‖y‖ⁿ‖x‖`.
#[derive(Clone, Debug)]
pub struct AdjointOrbit {
    pub value: OspElement,
    pub terms: Vec<OspElement>,
    pub tail_bound: f64,
}

pub fn adjoint_orbit(y: &OspElement, x: &OspElement, n_max: usize) -> Result<AdjointOrbit> {
    if y.parity() != Parity::Even {
        return Err(Error::WrongParity { even: true });
    }
    let mut term = x.clone();
    let mut value = x.clone();
    let mut terms = vec![x.clone()];
    for n in 1..=n_max {
        term = superbracket(y, &term)?.scaled(1.0 / n as f64);
        value = value.try_add(&term)?;
        terms.push(term.clone());
    }
    let tail_bound = exp_tail(y.norm(), n_max) * x.norm();
    Ok(AdjointOrbit { value, terms, tail_bound })
}

/// `Σ_{n > n_max} aⁿ/n!` for `a ≥ 0`, summed directly to avoid cancellation.
pub fn exp_tail(a: f64, n_max: usize) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let mut term = 1.0;
    for n in 1..=n_max {
        term *= a / n as f64;
    }
    let mut sum = 0.0;
    let mut n = n_max + 1;
    loop {
        term *= a / n as f64;
        sum += term;
        if !sum.is_finite() {
            return f64::INFINITY;
        }
        if (term <= sum * 1e-17 && n as f64 > a) || n > n_max + 10_000 {
            break;
        }
        n += 1;
    }
    sum
}

/// Bounds `max{‖v₁‖, ‖v₂‖} ≤ ‖v₁ ⊗ 1 + v₂ ⊗ i‖_ℂ ≤ ‖v₁‖ + ‖v₂‖` for a
/// complexified real vector with Euclidean real norm.
pub fn complexification_bounds(v1: &[f64], v2: &[f64]) -> Result<(f64, f64)> {
    if v1.len() != v2.len() {
        return Err(Error::DimensionMismatch { expected: v1.len(), got: v2.len() });
    }
    let n1 = v1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n2 = v2.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((n1.max(n2), n1 + n2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs};

    fn space() -> TruncatedSpace {
        TruncatedSpace::new(2, 2).unwrap()
    }

    fn zero_c(d: usize) -> CMatrix {
        CMatrix::zeros(d, d)
    }

    #[test]
    fn space_rejects_empty_parts() {
        assert!(TruncatedSpace::new(0, 2).is_err());
        assert!(TruncatedSpace::new(2, 0).is_err());
    }

    #[test]
    fn decompose_multiplication_by_i() {
        let s = space();
        let t = RealLinearOperator::new(CMatrix::identity(4, 4) * I, zero_c(4)).unwrap();
        let back = decompose(&s, &t.to_real_matrix()).unwrap();
        assert!(max_abs(&(back.lin() - CMatrix::identity(4, 4) * I)) < 1e-15);
        assert!(max_abs(back.conj_part()) < 1e-15);
    }

    #[test]
    fn decompose_complex_conjugation() {
        let s = space();
        let mut m = DMatrix::<f64>::identity(8, 8);
        for k in 4..8 {
            m[(k, k)] = -1.0;
        }
        let t = decompose(&s, &m).unwrap();
        assert!(max_abs(t.lin()) < 1e-15);
        assert!(max_abs(&(t.conj_part() - CMatrix::identity(4, 4))) < 1e-15);
    }

    #[test]
    fn decompose_identity_plus_conjugation() {
        // v ↦ v + v̄ doubles the real part and kills the imaginary part.
        let s = space();
        let mut m = DMatrix::<f64>::zeros(8, 8);
        for k in 0..4 {
            m[(k, k)] = 2.0;
        }
        let t = decompose(&s, &m).unwrap();
        assert!(max_abs(&(t.lin() - CMatrix::identity(4, 4))) < 1e-15);
        assert!(max_abs(&(t.conj_part() - CMatrix::identity(4, 4))) < 1e-15);
        let v = CVector::from_vec(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(2.0, 0.0)]);
        let w = t.apply(&v);
        for k in 0..4 {
            assert!((w[k] - c(2.0 * v[k].re, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn decompose_rejects_wrong_dimension() {
        let s = space();
        assert!(matches!(
            decompose(&s, &DMatrix::zeros(6, 6)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn residual_of_zero_and_skew_lin() {
        let s = space();
        assert_eq!(osp_residual(&OspElement::zero(s, Parity::Even)), 0.0);
        let mut lin = zero_c(4);
        lin[(0, 0)] = I;
        lin[(1, 1)] = I;
        let x = OspElement::new(s, RealLinearOperator::new(lin, zero_c(4)).unwrap(), Parity::Even).unwrap();
        assert!(x.residual() < 1e-15);
    }

    #[test]
    fn residual_of_projection_onto_f1() {
        let s = space();
        let mut lin = zero_c(4);
        lin[(0, 0)] = c(1.0, 0.0);
        let x = OspElement::new(s, RealLinearOperator::new(lin, zero_c(4)).unwrap(), Parity::Even).unwrap();
        // (P f₁, f₁) + (f₁, P f₁) = 2 is the worst pair.
        assert!((x.residual() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn parity_block_mismatch_is_structural_error() {
        let s = space();
        let mut lin = zero_c(4);
        lin[(2, 0)] = c(1.0, 0.0);
        let op = RealLinearOperator::new(lin, zero_c(4)).unwrap();
        assert!(matches!(
            OspElement::new(s, op, Parity::Even),
            Err(Error::ParityMismatch { .. })
        ));
    }

    #[test]
    fn odd_central_element_needs_zero_coordinate() {
        let s = space();
        assert!(CentralElement::new(OspElement::zero(s, Parity::Odd), 1.0).is_err());
        assert!(CentralElement::new(OspElement::zero(s, Parity::Odd), 0.0).is_ok());
    }

    #[test]
    fn norm_of_unitary_lin_part() {
        let s = TruncatedSpace::new(1, 1).unwrap();
        let x = OspElement::new(
            s,
            RealLinearOperator::new(CMatrix::identity(2, 2) * I, zero_c(2)).unwrap(),
            Parity::Even,
        )
        .unwrap();
        assert!((osp_norm(&x) - 1.0).abs() < 1e-15);
        assert_eq!(osp_norm(&OspElement::zero(s, Parity::Even)), 0.0);
    }

    #[test]
    fn complexification_examples() {
        assert_eq!(complexification_bounds(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), (0.0, 0.0));
        let (lo, hi) = complexification_bounds(&[0.6, 0.8], &[0.6, 0.8]).unwrap();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 2.0).abs() < 1e-15);
        let (lo, hi) = complexification_bounds(&[3.0, 4.0], &[0.0, 0.0]).unwrap();
        assert_eq!((lo, hi), (5.0, 5.0));
        assert!(complexification_bounds(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn exp_tail_matches_closed_form() {
        let a: f64 = 0.7;
        let partial: f64 = (0..=5).map(|n| a.powi(n) / (1..=n).map(|k| k as f64).product::<f64>()).sum();
        assert!((exp_tail(a, 5) - (a.exp() - partial)).abs() < 1e-15);
        assert_eq!(exp_tail(0.0, 3), 0.0);
    }
}
