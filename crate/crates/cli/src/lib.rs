//! Batch runner for the orthosymplectic checks in `osp-core`.
//!
//! A run reads a [`RunConfig`], executes the selected suites concurrently and
//! writes, in the output directory:
//!
//! * `reports.jsonl`: one record per check, suites in name order;
//! * `tables/<name>.csv`: plot-ready tables;
//! * `summary.json`: pass/fail counts and the config hash.
//!
//! Nothing time- or host-dependent is written, so equal configs give
//! byte-identical files.

pub mod config;
pub mod suites;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use osp_core::fock::{rho_full, FockBasis, ENUMERATION_VERSION};
use osp_core::generators::find_generator;
use osp_core::superalgebra::TruncatedSpace;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{ConfigError, Format, RunConfig, OUTPUT_DIR_ENV};
pub use suites::{Context, Record, Suite, SuiteOutput, Table, ALL_SUITES};

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] osp_core::Error),
}

impl RunError {
    pub fn record(&self) -> serde_json::Value {
        match self {
            Self::Config(e) => e.record(),
            Self::Io { .. } => serde_json::json!({ "error": "io_error", "message": self.to_string() }),
            Self::Core(_) => serde_json::json!({ "error": "core_error", "message": self.to_string() }),
        }
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config_hash: String,
    pub enumeration: String,
    pub seed: Option<u64>,
    pub truncation: config::Truncation,
    pub suites: BTreeMap<String, Counts>,
    pub total: Counts,
    pub failed_checks: Vec<String>,
    pub status: String,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub records: Vec<Record>,
    pub tables: Vec<Table>,
    pub summary: Summary,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.summary.total.failed == 0 {
            EXIT_PASS
        } else {
            EXIT_FAILURE
        }
    }
}

fn space_of(config: &RunConfig) -> Result<TruncatedSpace, ConfigError> {
    let t = &config.truncation;
    TruncatedSpace::new(t.m_f, t.m_b).map_err(|e| ConfigError::Truncation(e.to_string()))
}

/// Validates `config` and runs its suites without touching the file system.
pub fn execute(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let selected = config.validate()?;
    let space = space_of(config)?;
    let basis = if selected.iter().any(|s| s.needs_interior()) {
        Some(Arc::new(FockBasis::new(space, config.truncation.degree_cap)?))
    } else {
        None
    };
    let ctx = Context { config: config.clone(), space, basis };
    let outputs: Vec<(Suite, SuiteOutput)> = selected.par_iter().map(|&s| (s, s.run(&ctx))).collect();

    let mut records = Vec::new();
    let mut tables = Vec::new();
    let mut per_suite = BTreeMap::new();
    let mut total = Counts::default();
    let mut failed_checks = Vec::new();
    for (suite, out) in outputs {
        let counts: &mut Counts = per_suite.entry(suite.name().to_string()).or_default();
        for r in &out.records {
            if r.report.pass {
                counts.passed += 1;
                total.passed += 1;
            } else {
                counts.failed += 1;
                total.failed += 1;
                failed_checks.push(format!("{}/{}", r.suite, r.report.check));
            }
        }
        records.extend(out.records);
        tables.extend(out.tables);
    }
    let status = if total.failed == 0 { "pass" } else { "fail" }.to_string();
    let summary = Summary {
        config_hash: config.hash(),
        enumeration: ENUMERATION_VERSION.to_string(),
        seed: config.seed,
        truncation: config.truncation.clone(),
        suites: per_suite,
        total,
        failed_checks,
        status,
    };
    Ok(RunOutcome { records, tables, summary })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io = |source| RunError::Io { path: path.to_path_buf(), source };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}

fn csv_bytes(table: &Table) -> Result<Vec<u8>, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_io = |e: csv::Error| std::io::Error::other(e);
    let path = PathBuf::from(format!("tables/{}.csv", table.name));
    w.write_record(&table.header).map_err(|e| RunError::Io { path: path.clone(), source: to_io(e) })?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| RunError::Io { path: path.clone(), source: to_io(e) })?;
    }
    w.into_inner().map_err(|e| RunError::Io { path, source: e.into_error() })
}

/// Writes the artifacts of `outcome` into `config.output.dir`.
pub fn write_outputs(config: &RunConfig, outcome: &RunOutcome) -> Result<(), RunError> {
    let dir = &config.output.dir;
    if config.output.formats.contains(&Format::Jsonl) {
        let mut buf = Vec::new();
        for r in &outcome.records {
            serde_json::to_writer(&mut buf, r).expect("records serialize");
            buf.push(b'\n');
        }
        write_file(&dir.join("reports.jsonl"), &buf)?;
    }
    if config.output.formats.contains(&Format::Csv) {
        for t in &outcome.tables {
            write_file(&dir.join("tables").join(format!("{}.csv", t.name)), &csv_bytes(t)?)?;
        }
    }
    let mut summary = serde_json::to_vec_pretty(&outcome.summary).expect("summary serializes");
    summary.push(b'\n');
    write_file(&dir.join("summary.json"), &summary)
}

/// Runs the config and writes every artifact, also when checks fail.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let outcome = execute(config)?;
    write_outputs(config, &outcome)?;
    Ok(outcome)
}

/// Sparse-triplet text of `ρ(u)` for the generator `name`.
pub fn emit_matrix(config: &RunConfig, name: &str) -> Result<String, RunError> {
    let space = space_of(config)?;
    let family = osp_core::generators::generator_family(&space);
    let g = find_generator(&family, name).map_err(|_| ConfigError::UnknownGenerator(name.to_string()))?;
    let basis = Arc::new(FockBasis::new(space, config.truncation.degree_cap)?);
    Ok(rho_full(&g.element, &basis)?.to_triplet_text())
}
