use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid truncated space: m_f = {m_f}, m_b = {m_b} (both must be >= 1)")]
    InvalidSpace { m_f: usize, m_b: usize },

    /// Operator blocks do not match the declared parity.
    #[error("parity/block mismatch: off-parity block entry of size {magnitude:e}")]
    ParityMismatch { magnitude: f64 },

    #[error("odd central element must have zero central coordinate, got z = {z}")]
    OddCentralCoordinate { z: f64 },

    #[error("element is not certified: orthosymplectic residual {residual:e} exceeds {tolerance:e}")]
    NotCertified { residual: f64, tolerance: f64 },

    #[error("expected a{} element", if *.even { "n even" } else { "n odd" })]
    WrongParity { even: bool },

    #[error("factor outside the truncated space: {0}")]
    FactorOutsideSpace(String),

    #[error("no safe interior at degree cap {degree_cap} (need at least 6)")]
    NoSafeInterior { degree_cap: usize },

    #[error("vector has degree {degree}, outside the safe interior (max {max})")]
    OutsideSafeInterior { degree: usize, max: usize },

    #[error("adjoint series tail bound not reachable within {max_terms} terms (|t y| = {norm})")]
    SeriesTooLarge { norm: f64, max_terms: usize },

    #[error("order {0} is not supported")]
    UnsupportedOrder(usize),

    #[error("empty generating family")]
    EmptyFamily,

    #[error("sub-collection not closed under the bracket: [{left}, {right}] leaves the span (residual {residual:e})")]
    NotClosed {
        left: String,
        right: String,
        residual: f64,
    },

    #[error("unknown generator: {0}")]
    UnknownGenerator(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
