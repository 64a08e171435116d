//! Run configuration: a TOML file with flag and environment overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::suites::{Suite, ALL_SUITES};

/// Environment variable that replaces `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "OSP_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("no suites selected")]
    NoSuites,
    #[error("suite `{suite}` needs degree_cap >= 6 for a safe interior, got {degree_cap}")]
    NoSafeInterior { suite: String, degree_cap: usize },
    #[error("suite `{0}` is randomized and needs an explicit seed")]
    MissingSeed(String),
    #[error("invalid truncation: {0}")]
    Truncation(String),
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

impl ConfigError {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Read { .. } => "read_error",
            Self::Parse(_) => "parse_error",
            Self::UnknownSuite(_) => "unknown_suite",
            Self::NoSuites => "no_suites",
            Self::NoSafeInterior { .. } => "no_safe_interior",
            Self::MissingSeed(_) => "missing_seed",
            Self::Truncation(_) => "invalid_truncation",
            Self::Invalid { .. } => "invalid_value",
            Self::UnknownGenerator(_) => "unknown_generator",
        }
    }

    pub fn record(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub m_f: usize,
    pub m_b: usize,
    pub degree_cap: usize,
}

/// Gates applied by the runner to its aggregated checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub jacobi: f64,
    pub cocycle_identity: f64,
    pub hermitian: f64,
    pub square: f64,
    pub off_scalar: f64,
    pub kappa_spread: f64,
    pub conjugacy: f64,
    pub series_slack: f64,
    pub bch_slope: f64,
    pub interpolation_slack: f64,
    pub closed_form_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            jacobi: 1e-9,
            cocycle_identity: 1e-9,
            hermitian: 1e-10,
            square: 1e-9,
            off_scalar: 1e-8,
            kappa_spread: 1e-6,
            conjugacy: 1e-7,
            series_slack: 1e-12,
            bch_slope: 4.5,
            interpolation_slack: 1e-12,
            closed_form_rel: 1e-6,
        }
    }
}

/// Sample counts and fixed parameters of the randomized checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub triples: usize,
    pub pairs: usize,
    pub conjugacy_pairs: usize,
    pub conjugacy_time: f64,
    /// Scaled norm of the sampled conjugacy pair.
    pub conjugacy_norm: f64,
    pub series_directions: usize,
    pub series_terms: usize,
    pub bch_pairs: usize,
    pub bch_eps: f64,
    pub interpolation: usize,
    pub analytic_functions: usize,
    pub witness_levels: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Self {
            triples: 200,
            pairs: 200,
            conjugacy_pairs: 50,
            conjugacy_time: 0.3,
            conjugacy_norm: 1.0,
            series_directions: 100,
            series_terms: 80,
            bch_pairs: 8,
            bch_eps: 0.2,
            interpolation: 1000,
            analytic_functions: 20,
            witness_levels: 40,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Jsonl, Format::Csv]
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: PathBuf::from("osp-reports"), formats: default_formats() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub suites: Vec<String>,
    pub truncation: Truncation,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub output: Output,
}

impl Default for RunConfig {
    /// The reference configuration: `m_f = m_b = 2`, `D = 8`, seed 42, all suites.
    fn default() -> Self {
        Self {
            seed: Some(42),
            suites: ALL_SUITES.iter().map(|s| s.name().to_string()).collect(),
            truncation: Truncation { m_f: 2, m_b: 2, degree_cap: 8 },
            tolerances: Tolerances::default(),
            samples: Samples::default(),
            output: Output::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    /// Applies `OSP_OUTPUT_DIR` if it is set and non-empty.
    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.output.dir = PathBuf::from(dir);
        }
    }

    /// Selected suites, sorted by name and deduplicated.
    pub fn selected(&self) -> Result<Vec<Suite>, ConfigError> {
        let mut out = Vec::new();
        for name in &self.suites {
            let suite = Suite::from_name(name).ok_or_else(|| ConfigError::UnknownSuite(name.clone()))?;
            if !out.contains(&suite) {
                out.push(suite);
            }
        }
        out.sort_by_key(|s| s.name());
        Ok(out)
    }

    pub fn validate(&self) -> Result<Vec<Suite>, ConfigError> {
        let suites = self.selected()?;
        if suites.is_empty() {
            return Err(ConfigError::NoSuites);
        }
        let t = &self.truncation;
        osp_core::superalgebra::TruncatedSpace::new(t.m_f, t.m_b).map_err(|e| ConfigError::Truncation(e.to_string()))?;
        if t.m_f > 30 {
            return Err(ConfigError::Truncation(format!("at most 30 fermionic modes, got {}", t.m_f)));
        }
        for suite in &suites {
            if suite.needs_interior() && t.degree_cap < 6 {
                return Err(ConfigError::NoSafeInterior { suite: suite.name().into(), degree_cap: t.degree_cap });
            }
            if suite.randomized() && self.seed.is_none() {
                return Err(ConfigError::MissingSeed(suite.name().into()));
            }
        }
        let s = &self.samples;
        let positive = [
            ("samples.triples", s.triples),
            ("samples.pairs", s.pairs),
            ("samples.conjugacy_pairs", s.conjugacy_pairs),
            ("samples.series_directions", s.series_directions),
            ("samples.bch_pairs", s.bch_pairs),
            ("samples.interpolation", s.interpolation),
            ("samples.analytic_functions", s.analytic_functions),
            ("samples.witness_levels", s.witness_levels),
        ];
        for (field, value) in positive {
            if value == 0 {
                return Err(ConfigError::Invalid { field, reason: "must be positive".into() });
            }
        }
        if !(s.conjugacy_norm > 0.0) {
            return Err(ConfigError::Invalid { field: "samples.conjugacy_norm", reason: "must be positive".into() });
        }
        if !(s.bch_eps > 0.0) {
            return Err(ConfigError::Invalid { field: "samples.bch_eps", reason: "must be positive".into() });
        }
        Ok(suites)
    }

    /// SHA-256 of the canonical TOML form, with the output directory left
    /// out so that relocated runs hash identically.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output.dir = PathBuf::new();
        canonical.output.formats.sort();
        let text = toml::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
