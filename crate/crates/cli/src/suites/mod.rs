//! The five check suites. Each suite is a pure function of the config and
//! owns its random stream, so suites can run concurrently and still produce
//! identical output.

mod algebra;
mod counterexamples;
mod oscillator;
mod restriction;
mod series;

use std::sync::Arc;

use osp_core::fock::FockBasis;
use osp_core::superalgebra::TruncatedSpace;
use osp_core::verify::IdentityReport;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Algebra,
    Counterexamples,
    Oscillator,
    Restriction,
    Series,
}

pub const ALL_SUITES: [Suite; 5] =
    [Suite::Algebra, Suite::Counterexamples, Suite::Oscillator, Suite::Restriction, Suite::Series];

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::Algebra => "algebra",
            Self::Counterexamples => "counterexamples",
            Self::Oscillator => "oscillator",
            Self::Restriction => "restriction",
            Self::Series => "series",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        ALL_SUITES.into_iter().find(|s| s.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Algebra => "graded Jacobi, 2-cocycle identity and bracket norm bound on random triples",
            Self::Counterexamples => "moments of h, L^n norms, analytic bound and the divergence witness",
            Self::Oscillator => "Fock representation identities, cocycle realization, pre-representation axioms, conjugacy",
            Self::Restriction => "even-part restriction with literal matrix comparison",
            Self::Series => "orbit series, BCH order, interpolation bound, radii and seminorms",
        }
    }

    /// Runs on the Fock truncation and needs `D ≥ 6`.
    pub fn needs_interior(self) -> bool {
        matches!(self, Self::Oscillator | Self::Restriction | Self::Series)
    }

    pub fn randomized(self) -> bool {
        true
    }

    /// Stream id of this suite's generator, independent of selection order.
    fn stream(self) -> u64 {
        self as u64
    }

    pub(crate) fn run(self, ctx: &Context) -> SuiteOutput {
        let result = match self {
            Self::Algebra => algebra::run(ctx),
            Self::Counterexamples => counterexamples::run(ctx),
            Self::Oscillator => oscillator::run(ctx),
            Self::Restriction => restriction::run(ctx),
            Self::Series => series::run(ctx),
        };
        match result {
            Ok(out) => out,
            Err(e) => SuiteOutput {
                records: vec![Record::failure(self.name(), "suite_error", e.to_string())],
                tables: Vec::new(),
            },
        }
    }
}

/// One line of `reports.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    #[serde(flatten)]
    pub report: IdentityReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
}

impl Record {
    pub fn new(suite: &str, report: IdentityReport) -> Self {
        Self { suite: suite.into(), report, samples: None }
    }

    pub fn sampled(suite: &str, report: IdentityReport, samples: usize) -> Self {
        Self { suite: suite.into(), report, samples: Some(samples) }
    }

    fn failure(suite: &str, check: &str, message: String) -> Self {
        let mut report = IdentityReport::new(check, f64::INFINITY, 0.0, 0);
        report.note = Some(message);
        Self::new(suite, report)
    }
}

/// A plot-ready table written as `tables/<name>.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>) -> Self {
        Self { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOutput {
    pub records: Vec<Record>,
    pub tables: Vec<Table>,
}

/// Shared read-only inputs of a run.
pub struct Context {
    pub config: RunConfig,
    pub space: TruncatedSpace,
    /// `None` when no selected suite needs the Fock truncation.
    pub basis: Option<Arc<FockBasis>>,
}

impl Context {
    pub fn rng(&self, suite: Suite) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.config.seed.unwrap_or(0));
        r.set_stream(suite.stream());
        r
    }

    pub(crate) fn basis(&self) -> osp_core::Result<&Arc<FockBasis>> {
        self.basis.as_ref().ok_or(osp_core::Error::NoSafeInterior { degree_cap: self.config.truncation.degree_cap })
    }
}

/// `f64` formatted with round-trip precision for CSV cells.
pub(crate) fn num(x: f64) -> String {
    osp_core::fock::fmt_f64(x)
}

/// Maximum of `values` (`−∞` when empty); a NaN anywhere gives NaN so that
/// the gate fails.
pub(crate) fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

/// Gaussian vector on degrees `≤ max_degree`, normalized in the Fock norm.
pub(crate) fn random_fock_vector<R: rand::Rng>(
    basis: &FockBasis,
    max_degree: usize,
    rng: &mut R,
) -> osp_core::fock::FockVector {
    use rand_distr::StandardNormal;
    let mut v = osp_core::fock::FockVector::zero();
    for idx in basis.indices().iter().filter(|i| i.degree() <= max_degree) {
        let z = num_complex::Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        v.add_term(idx.clone(), z);
    }
    let norm = osp_core::series::gram_norm(basis, &v.to_dense(basis).expect("inside the basis"));
    v.scaled(num_complex::Complex64::new(1.0 / norm, 0.0))
}
