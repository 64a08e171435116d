//! Truncated restricted orthosymplectic superalgebra, its oscillator
//! representation on a super Fock space, and numerical checks of the
//! identities the representation satisfies.

pub mod counterexample;
pub mod error;
pub mod fock;
pub mod generators;
pub mod linalg;
pub mod sample;
pub mod series;
pub mod superalgebra;
pub mod verify;

pub use error::{Error, Result};
