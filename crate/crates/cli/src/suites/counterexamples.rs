use osp_core::counterexample::{
    analytic_bound_check, banach_norm, divergence_witness, factorial_inequality, lp_power, moment_integral, G_eval,
    G_quadrature, NormScheme, SampledFunction, WitnessOutcome,
};
use osp_core::verify::IdentityReport;
use rand::Rng;
use rayon::prelude::*;

use super::{num, worst, Context, Record, Suite, SuiteOutput, Table};

const NAME: &str = "counterexamples";

/// Agreement required between the closed form of `G` and quadrature.
const G_TOL: f64 = 1e-10;
/// Slack in the analytic bound, as in the core check.
const ANALYTIC_TOL: f64 = 1e-8;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub(super) fn run(ctx: &Context) -> osp_core::Result<SuiteOutput> {
    let cfg = &ctx.config;
    let tol = &cfg.tolerances;
    let mut rng = ctx.rng(Suite::Counterexamples);
    let mut out = SuiteOutput::default();

    let xs = [1e-8, 1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 30.0, 100.0];
    let mut g_worst = 0.0_f64;
    for x in xs {
        let (a, b) = (G_eval(x)?, G_quadrature(x)?);
        g_worst = worst([g_worst, (a - b).abs() / a.abs()]);
    }
    out.records.push(Record::sampled(NAME, IdentityReport::new("g_closed_form", g_worst, G_TOL, 0), xs.len()));

    let mut table = Table::new("moments", vec!["n", "integral", "exact", "relative_error"]);
    let mut moment_worst = 0.0_f64;
    for n in 0..=6 {
        let (got, exact) = (moment_integral(n)?, factorial(2 * n + 1));
        let rel = (got - exact).abs() / exact;
        moment_worst = worst([moment_worst, rel]);
        table.push(vec![n.to_string(), num(got), num(exact), num(rel)]);
    }
    out.tables.push(table);
    out.records.push(Record::new(NAME, IdentityReport::new("h_moments", moment_worst, tol.closed_form_rel, 6)));

    let mut table = Table::new("log_norms", vec!["n", "power", "exact", "relative_error"]);
    let mut log_worst = 0.0_f64;
    for n in 1..=8 {
        let (got, exact) = (lp_power(&SampledFunction::log(), n)?, factorial(n));
        let rel = (got - exact).abs() / exact;
        log_worst = worst([log_worst, rel]);
        table.push(vec![n.to_string(), num(got), num(exact), num(rel)]);
    }
    out.tables.push(table);
    out.records.push(Record::new(NAME, IdentityReport::new("log_norm_powers", log_worst, tol.closed_form_rel, 8)));

    out.records.push(Record::new(NAME, factorial_inequality(20)));

    let mut table = Table::new("banach_norms", vec!["function", "scheme", "value", "argmax", "attained_at_n_max"]);
    for (f, scheme) in [
        (SampledFunction::h(), NormScheme::A),
        (SampledFunction::log(), NormScheme::A),
        (SampledFunction::log(), NormScheme::B),
        (SampledFunction::constant(0.3), NormScheme::B),
    ] {
        let b = banach_norm(&f, scheme, 8)?;
        table.push(vec![
            f.name().to_string(),
            format!("{scheme:?}"),
            num(b.value),
            b.argmax.to_string(),
            b.attained_at_n_max.to_string(),
        ]);
    }
    out.tables.push(table);

    // Random a·(−ln x)^p + b·x^k rescaled to scheme-B norm in [0.05, 0.4].
    let k = cfg.samples.analytic_functions;
    let draws: Vec<(f64, i32, f64, f64, f64)> = (0..k)
        .map(|_| {
            (rng.gen_range(0.0..1.0), rng.gen_range(0..3), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..4.0), rng.gen_range(0.05..0.4))
        })
        .collect();
    let residuals = draws
        .par_iter()
        .enumerate()
        .map(|(i, &(a, p, b, k, target))| {
            let f = SampledFunction::singular(format!("f{i}"), move |s| a * s.powi(p) + b * (-k * s).exp());
            let norm = banach_norm(&f, NormScheme::B, 12)?.value;
            Ok(analytic_bound_check(&f.scaled(target / norm), 6)?.residual)
        })
        .collect::<osp_core::Result<Vec<f64>>>()?;
    out.records.push(Record::sampled(
        NAME,
        IdentityReport::new("analytic_bound", worst(residuals.iter().copied()), ANALYTIC_TOL, 6)
            .with_note("max of sum - 1/(1 - 2|f|) over sampled f"),
        k,
    ));

    let levels = cfg.samples.witness_levels;
    let mut table = Table::new("divergence_witness", vec!["t", "level", "delta", "log10_integral"]);
    for t in [0.0, 0.5, 1.0, 2.0] {
        let w = divergence_witness(t, 0.5, levels)?;
        for row in &w.rows {
            table.push(vec![num(t), row.level.to_string(), num(row.delta), num(row.log10_integral)]);
        }
        if t == 1.0 {
            let (residual, note) = match w.outcome {
                WitnessOutcome::Diverges { level } => (0.0, format!("exceeds 1e6 at level {level}")),
                WitnessOutcome::Inconclusive => (1.0, format!("below 1e6 after {levels} levels")),
            };
            let monotone = if w.strictly_increasing { 0.0 } else { 1.0 };
            out.records.push(Record::new(
                NAME,
                IdentityReport::new("divergence_witness", residual + monotone, 0.0, levels)
                    .with_note(format!("{note}; strictly increasing: {}", w.strictly_increasing)),
            ));
        }
    }
    out.tables.push(table);
    Ok(out)
}
