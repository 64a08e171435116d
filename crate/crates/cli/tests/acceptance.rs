//! End-to-end acceptance on the reference configuration.
//!
//! The `osp` binary runs twice on `configs/reference.toml`; every criterion
//! is then judged from the written artifacts with its own pinned gate, and
//! where possible against an oracle computed here rather than by the runner.
//! One `criterion N: PASS|FAIL` line is printed per criterion.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use osp_core::fock::{rho_full, FockBasis};
use osp_core::generators::generator_family;
use osp_core::superalgebra::{Parity, TruncatedSpace};
use osp_core::verify::restrict;
use serde_json::Value;
use tempfile::TempDir;

const SEED: u64 = 42;
const DEGREE_CAP: usize = 8;

struct Artifacts {
    dir: PathBuf,
    records: Vec<Value>,
}

impl Artifacts {
    fn load(dir: &Path) -> Self {
        let text = std::fs::read_to_string(dir.join("reports.jsonl")).expect("reports.jsonl");
        let records = text.lines().map(|l| serde_json::from_str(l).expect("record")).collect();
        Self { dir: dir.to_path_buf(), records }
    }

    fn record(&self, suite: &str, check: &str) -> Option<&Value> {
        self.records.iter().find(|r| r["suite"] == suite && r["check"] == check)
    }

    /// Rows of `tables/<name>.csv` keyed by header.
    fn table(&self, name: &str) -> Vec<BTreeMap<String, String>> {
        let mut r = csv::Reader::from_path(self.dir.join("tables").join(format!("{name}.csv"))).expect(name);
        let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
        r.records()
            .map(|row| header.iter().cloned().zip(row.unwrap().iter().map(String::from)).collect())
            .collect()
    }
}

fn f(row: &BTreeMap<String, String>, col: &str) -> f64 {
    row[col].parse().unwrap_or_else(|_| panic!("{col} = {}", row[col]))
}

/// Residual of a record; `None` when the record is absent.
fn residual(a: &Artifacts, suite: &str, check: &str) -> Option<f64> {
    a.record(suite, check)?["residual"].as_f64()
}

fn samples(a: &Artifacts, suite: &str, check: &str) -> u64 {
    a.record(suite, check).and_then(|r| r["samples"].as_u64()).unwrap_or(0)
}

struct Verdict {
    lines: Vec<String>,
    failed: Vec<usize>,
}

impl Verdict {
    fn judge(&mut self, n: usize, parts: &[(&str, bool)]) {
        let ok = parts.iter().all(|p| p.1);
        let detail: Vec<String> =
            parts.iter().map(|(what, pass)| format!("{what} [{}]", if *pass { "ok" } else { "fail" })).collect();
        let line = format!("criterion {n}: {} {}", if ok { "PASS" } else { "FAIL" }, detail.join("; "));
        println!("{line}");
        self.lines.push(line);
        if !ok {
            self.failed.push(n);
        }
    }
}

fn within(x: Option<f64>, gate: f64) -> bool {
    x.is_some_and(|x| x <= gate)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn run_reference(out: &Path) -> i32 {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml");
    let status = Command::new(env!("CARGO_BIN_EXE_osp"))
        .args(["run", "-c", config.to_str().unwrap(), "-o", out.to_str().unwrap()])
        .env_remove(osp_cli::OUTPUT_DIR_ENV)
        .status()
        .expect("spawn osp");
    status.code().unwrap_or(-1)
}

fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.push((p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn acceptance() {
    let tmp = TempDir::new().unwrap();
    let (d1, d2) = (tmp.path().join("first"), tmp.path().join("second"));
    let codes = [run_reference(&d1), run_reference(&d2)];
    let a = Artifacts::load(&d1);
    let mut v = Verdict { lines: Vec::new(), failed: Vec::new() };

    // 1. Graded Jacobi and cocycle identity on 200 triples, relative 1e-9.
    let triples = a.table("algebra_triples");
    let col_max = |col: &str| triples.iter().map(|r| f(r, col)).fold(f64::NEG_INFINITY, f64::max);
    v.judge(1, &[
        ("200 triples", triples.len() == 200 && samples(&a, "algebra", "graded_jacobi") == 200),
        ("jacobi <= 1e-9", within(residual(&a, "algebra", "graded_jacobi"), 1e-9) && col_max("jacobi") <= 1e-9),
        (
            "cocycle identity <= 1e-9",
            within(residual(&a, "algebra", "cocycle_identity"), 1e-9) && col_max("cocycle_identity") <= 1e-9,
        ),
    ]);

    // 2. Hermiticity on the safe interior, square relation on degrees <= D - 4.
    let safe = |check: &str| a.record("oscillator", check).and_then(|r| r["safe_degree"].as_u64()).unwrap_or(99);
    v.judge(2, &[
        ("skew-hermitian <= 1e-10", within(residual(&a, "oscillator", "skew_hermitian"), 1e-10)),
        ("odd hermitian <= 1e-10", within(residual(&a, "oscillator", "odd_hermitian"), 1e-10)),
        ("generator axioms <= 1e-10", {
            within(residual(&a, "oscillator", "axiom_iv_skew_adjoint"), 1e-10)
                && within(residual(&a, "oscillator", "axiom_v_odd_symmetric"), 1e-10)
        }),
        ("square relation <= 1e-9", {
            within(residual(&a, "oscillator", "odd_square"), 1e-9)
                && within(residual(&a, "oscillator", "odd_square_relation"), 1e-9)
        }),
        ("square region <= D - 4", safe("odd_square") <= DEGREE_CAP as u64 - 4),
    ]);

    // 3. Scalar defect on 200 pairs and κ = c/(iω) constant; κ recomputed
    // here from the fitted scalars.
    let rows = a.table("cocycle_realization");
    let kappas: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| f(r, "omega").abs() > 1e-12)
        .map(|r| {
            let (re, im, w) = (f(r, "scalar_re"), f(r, "scalar_im"), f(r, "omega"));
            // (re + i im) / (i w)
            (im / w, -re / w)
        })
        .collect();
    let k = kappas.len() as f64;
    let mean = (kappas.iter().map(|z| z.0).sum::<f64>() / k, kappas.iter().map(|z| z.1).sum::<f64>() / k);
    let var = kappas.iter().map(|z| (z.0 - mean.0).powi(2) + (z.1 - mean.1).powi(2)).sum::<f64>() / k;
    let spread = var.sqrt() / mean.0.hypot(mean.1);
    let off = rows.iter().map(|r| f(r, "off_scalar")).fold(f64::NEG_INFINITY, f64::max);
    println!("kappa = {:.15} + {:.3e}i over {} pairs, spread {spread:.3e}", mean.0, mean.1, kappas.len());
    v.judge(3, &[
        ("200 pairs", rows.len() == 200),
        ("off-scalar <= 1e-8", off <= 1e-8 && within(residual(&a, "oscillator", "commutator_scalar"), 1e-8)),
        ("kappa spread <= 1e-6", kappas.len() > 100 && spread <= 1e-6),
        ("kappa reported", a.record("oscillator", "kappa_constant").is_some_and(|r| r["fitted_scalar"].is_array())),
    ]);

    // 4. Conjugacy at t = 0.3 on 50 pairs, and refinement D -> D + 2.
    let conj = a.table("conjugacy");
    let worst = conj.iter().map(|r| f(r, "residual_d")).fold(f64::NEG_INFINITY, f64::max);
    let worst_fine = conj.iter().map(|r| f(r, "residual_d_plus_2")).fold(f64::NEG_INFINITY, f64::max);
    let decreasing = conj.iter().filter(|r| f(r, "residual_d_plus_2") < f(r, "residual_d")).count();
    println!("conjugacy worst residual {worst:.3e} at D = 8, {worst_fine:.3e} at D = 10; {decreasing}/50 decrease");
    v.judge(4, &[
        ("50 pairs at t = 0.3", conj.len() == 50 && conj.iter().all(|r| f(r, "t") == 0.3)),
        ("residual <= 1e-7", worst <= 1e-7),
        ("strictly decreasing at D = 10", decreasing == conj.len()),
    ]);

    // 5. Orbit series within tail + 1e-12 on 100 directions; BCH slope >= 4.5,
    // recomputed from the sweep errors.
    let orbit = a.table("orbit_series");
    let orbit_ok = orbit.iter().all(|r| f(r, "error") <= f(r, "tail_bound") + 1e-12 && f(r, "t").abs() <= 1.0);
    let bch = a.table("bch_sweep");
    let slopes: Vec<f64> = bch
        .iter()
        .map(|r| (f(r, "error") / f(r, "error_half")).ln() / (f(r, "eps") / f(r, "eps_half")).ln())
        .collect();
    let min_slope = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    println!("minimum BCH slope {min_slope:.3}");
    v.judge(5, &[
        ("100 directions", orbit.len() == 100),
        ("error <= tail + 1e-12", orbit_ok && within(residual(&a, "series", "orbit_series_vs_exponential"), 1e-12)),
        ("BCH slope >= 4.5", !slopes.is_empty() && min_slope >= 4.5),
    ]);

    // 6. Interpolation bound over 1000 samples, no violation beyond 1e-12.
    let interp = a.record("series", "interpolation_bound");
    v.judge(6, &[
        ("1000 samples", samples(&a, "series", "interpolation_bound") == 1000),
        ("max(lhs - rhs) <= 1e-12", within(residual(&a, "series", "interpolation_bound"), 1e-12)),
        ("0 violations", interp.and_then(|r| r["note"].as_str()).is_some_and(|n| n.contains(" 0 violations"))),
    ]);

    // 7. Closed forms against factorials computed here.
    let moments = a.table("moments");
    let moments_ok = (0..=6).all(|n| {
        moments.iter().find(|r| r["n"] == n.to_string()).is_some_and(|r| {
            let exact = factorial(2 * n + 1);
            ((f(r, "integral") - exact) / exact).abs() <= 1e-6
        })
    });
    let logs = a.table("log_norms");
    let logs_ok = (1..=8).all(|n| {
        logs.iter().find(|r| r["n"] == n.to_string()).is_some_and(|r| {
            let exact = factorial(n);
            ((f(r, "power") - exact) / exact).abs() <= 1e-6
        })
    });
    // Dividing by (n!)^2 leaves the exact integer form C(2n, n) <= 4^n.
    let factorial_ok = (0..=20u128).all(|n| {
        let central = (0..n).fold(1u128, |c, k| c * (2 * n - k) / (k + 1));
        central <= 1u128 << (2 * n)
    });
    v.judge(7, &[
        ("moments = (2n+1)! for n <= 6", moments_ok),
        ("log norm powers = n! for n <= 8", logs_ok),
        ("(2n)! <= 4^n (n!)^2 for n <= 20", factorial_ok && residual(&a, "counterexamples", "factorial_inequality") == Some(0.0)),
        (
            "analytic bound on 20 functions",
            samples(&a, "counterexamples", "analytic_bound") == 20
                && within(residual(&a, "counterexamples", "analytic_bound"), 0.0),
        ),
    ]);

    // 8. The witness integral passes 1e6 within 40 halvings, monotonically.
    let witness: Vec<f64> =
        a.table("divergence_witness").iter().filter(|r| f(r, "t") == 1.0).map(|r| f(r, "log10_integral")).collect();
    let crossing = witness.iter().position(|&l| l > 6.0);
    let monotone = crossing.is_some_and(|c| witness[..=c].windows(2).all(|w| w[1] > w[0]));
    println!("witness exceeds 1e6 at level {:?}", crossing.map(|c| c + 1));
    v.judge(8, &[
        ("exceeds 1e6 within 40 levels", crossing.is_some_and(|c| c < 40)),
        ("monotone", monotone),
    ]);

    // 9. Even-part restriction: axioms pass, and every restricted generator
    // acts by the byte-identical matrix the CLI emits for the full family.
    let restriction_ok = a.records.iter().filter(|r| r["suite"] == "restriction").all(|r| r["pass"] == true)
        && a.record("restriction", "literal_restriction").is_some();
    let space = TruncatedSpace::new(2, 2).unwrap();
    let basis = Arc::new(FockBasis::new(space, DEGREE_CAP).unwrap());
    let family = generator_family(&space);
    let even: Vec<&str> =
        family.iter().filter(|g| g.element.parity() == Parity::Even).map(|g| g.name.as_str()).collect();
    let restricted = restrict(&family, &even, &basis, SEED).unwrap();
    let literal = restricted.generators.iter().all(|g| {
        let out = Command::new(env!("CARGO_BIN_EXE_osp"))
            .args(["emit-matrix", "-g", &g.name, "--file", "-"])
            .output()
            .expect("spawn osp");
        out.status.success() && out.stdout == rho_full(&g.element, &basis).unwrap().to_triplet_text().into_bytes()
    });
    v.judge(9, &[
        ("restricted prerep passes", restriction_ok),
        ("byte-equal triplets", !restricted.generators.is_empty() && literal),
    ]);

    // 10. Exit status and byte determinism.
    let (t1, t2) = (tree(&d1), tree(&d2));
    v.judge(10, &[
        ("exit 0", codes == [0, 0]),
        ("byte-identical outputs", !t1.is_empty() && t1 == t2),
    ]);

    assert!(v.failed.is_empty(), "failing criteria {:?}:\n{}", v.failed, v.lines.join("\n"));
}
