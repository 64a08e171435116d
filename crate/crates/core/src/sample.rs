//! Random certified elements for property tests and Monte-Carlo suites.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, CMatrix};
use crate::superalgebra::{
    project_to_osp, CentralElement, OspElement, Parity, RealLinearOperator, TruncatedSpace,
};

fn gaussian_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Real-linear operator with independent standard complex Gaussian entries.
pub fn random_operator<R: Rng + ?Sized>(space: &TruncatedSpace, rng: &mut R) -> RealLinearOperator {
    let d = space.dim();
    let lin = gaussian_matrix(d, rng);
    let conj = gaussian_matrix(d, rng);
    RealLinearOperator::new(lin, conj).expect("square matrices of equal size")
}

/// Projection of a Gaussian operator onto 𝔬𝔰𝔭, rescaled to `‖x‖ = norm`.
pub fn random_osp<R: Rng + ?Sized>(space: &TruncatedSpace, parity: Parity, norm: f64, rng: &mut R) -> OspElement {
    loop {
        let raw = random_operator(space, rng);
        let x = project_to_osp(space, &raw, parity).expect("dimensions agree");
        let n = x.norm();
        if n > 1e-8 {
            return x.scaled(norm / n);
        }
    }
}

/// Random element of the central extension: body as in [`random_osp`] and a
/// standard normal central coordinate for even bodies.
pub fn random_central<R: Rng + ?Sized>(space: &TruncatedSpace, parity: Parity, norm: f64, rng: &mut R) -> CentralElement {
    let body = random_osp(space, parity, norm, rng);
    let z = match parity {
        Parity::Even => rng.sample(StandardNormal),
        Parity::Odd => 0.0,
    };
    CentralElement::new(body, z).expect("odd bodies get z = 0")
}

/// Uniformly random parity.
pub fn random_parity<R: Rng + ?Sized>(rng: &mut R) -> Parity {
    if rng.gen::<bool>() {
        Parity::Even
    } else {
        Parity::Odd
    }
}
