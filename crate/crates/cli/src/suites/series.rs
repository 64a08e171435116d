use osp_core::fock::{FockIndex, FockVector};
use osp_core::generators::generator_family;
use osp_core::sample::{random_central, random_osp};
use osp_core::series::{
    bch_sweep, check_interpolation_bounds, gram_norm, orbit_exact, orbit_series, radius_estimate, seminorm_chain_report,
};
use osp_core::superalgebra::{CentralElement, OspElement, Parity};
use osp_core::verify::IdentityReport;
use rand::Rng;
use rayon::prelude::*;

use super::{num, random_fock_vector, worst, Context, Record, Suite, SuiteOutput, Table};

const NAME: &str = "series";

pub(super) fn run(ctx: &Context) -> osp_core::Result<SuiteOutput> {
    let basis = ctx.basis()?;
    let cfg = &ctx.config;
    let tol = &cfg.tolerances;
    let cap = basis.degree_cap();
    let region = cap - 4;
    let mut rng = ctx.rng(Suite::Series);
    let mut out = SuiteOutput::default();

    // Orbit series against the matrix exponential, |t|·‖u‖ ≤ 1.
    let n = cfg.samples.series_directions;
    let terms = cfg.samples.series_terms;
    let draws: Vec<(CentralElement, f64, FockVector)> = (0..n)
        .map(|_| {
            let u = random_central(&ctx.space, Parity::Even, 1.0, &mut rng);
            let t = rng.gen_range(-1.0..=1.0);
            (u, t, random_fock_vector(basis, region, &mut rng))
        })
        .collect();
    let rows: Vec<(f64, f64, f64, bool)> = draws
        .par_iter()
        .map(|(u, t, v)| {
            let s = orbit_series(v, u, *t, terms, basis)?;
            let exact = orbit_exact(v, u, *t, basis)?;
            let err = gram_norm(basis, &s.value.minus(&exact).to_dense(basis)?);
            Ok((*t, err, s.tail_bound, s.converged))
        })
        .collect::<osp_core::Result<_>>()?;
    let mut table = Table::new("orbit_series", vec!["sample", "t", "error", "tail_bound", "converged"]);
    for (i, (t, err, tail, conv)) in rows.iter().enumerate() {
        table.push(vec![i.to_string(), num(*t), num(*err), num(*tail), conv.to_string()]);
    }
    out.tables.push(table);
    let excess = worst(rows.iter().map(|r| (r.1 - r.2).max(0.0)));
    let unconverged = rows.iter().filter(|r| !r.3).count();
    out.records.push(Record::sampled(
        NAME,
        IdentityReport::new("orbit_series_vs_exponential", excess, tol.series_slack, cap)
            .with_note(format!("error beyond the tail bound; {terms} terms, {unconverged} unconverged")),
        n,
    ));

    // BCH at order 4: error ratio under ε → ε/2.
    let m = cfg.samples.bch_pairs;
    let pairs: Vec<(OspElement, OspElement)> = (0..m)
        .map(|_| (random_osp(&ctx.space, Parity::Even, 1.0, &mut rng), random_osp(&ctx.space, Parity::Even, 1.0, &mut rng)))
        .collect();
    let sweeps = pairs
        .par_iter()
        .map(|(y, y2)| bch_sweep(y, y2, cfg.samples.bch_eps, basis))
        .collect::<osp_core::Result<Vec<_>>>()?;
    let mut table = Table::new("bch_sweep", vec!["pair", "eps", "error", "eps_half", "error_half", "slope"]);
    for (i, s) in sweeps.iter().enumerate() {
        table.push(vec![i.to_string(), num(s.eps[0]), num(s.errors[0]), num(s.eps[1]), num(s.errors[1]), num(s.slope)]);
    }
    out.tables.push(table);
    let slope = sweeps.iter().map(|s| s.slope).fold(f64::INFINITY, f64::min);
    let mut rep = IdentityReport::report_only("bch_order_slope", slope, region)
        .with_note("minimum observed slope; passes when at least the tolerance");
    rep.tolerance = Some(tol.bch_slope);
    rep.pass = slope >= tol.bch_slope;
    out.records.push(Record::sampled(NAME, rep, m));

    // Interpolation inequality for odd y.
    let k = cfg.samples.interpolation;
    let draws: Vec<(OspElement, FockVector)> = (0..k)
        .map(|_| {
            let norm = rng.gen_range(0.1..3.0);
            (random_osp(&ctx.space, Parity::Odd, norm, &mut rng), random_fock_vector(basis, region, &mut rng))
        })
        .collect();
    let slack = draws
        .par_iter()
        .map(|(y, v)| Ok(check_interpolation_bounds(v, y, basis)?.residual))
        .collect::<osp_core::Result<Vec<f64>>>()?;
    let violations = slack.iter().filter(|&&r| !(r <= tol.interpolation_slack)).count();
    out.records.push(Record::sampled(
        NAME,
        IdentityReport::new("interpolation_bound", worst(slack.iter().copied()), tol.interpolation_slack, region)
            .with_note(format!("max of lhs - rhs; {violations} violations")),
        k,
    ));

    // Growth radii of a few monomials (report only).
    let u = CentralElement::from(random_osp(&ctx.space, Parity::Even, 1.0, &mut rng));
    let probes: Vec<FockIndex> = basis.indices().iter().filter(|i| i.degree() <= 2).cloned().collect();
    let mut table = Table::new("radius", vec!["vector", "radius", "growth", "terms", "truncation_limited"]);
    for idx in &probes {
        let est = radius_estimate(&FockVector::monomial(idx.clone()), &u, 30, basis)?;
        table.push(vec![
            idx.label(),
            num(est.radius),
            num(est.growth),
            est.terms.to_string(),
            est.truncation_limited.to_string(),
        ]);
    }
    out.tables.push(table);

    // Seminorm chain (report only, sampled lower bounds).
    let even: Vec<OspElement> = generator_family(&ctx.space)
        .into_iter()
        .filter(|g| g.element.parity() == Parity::Even)
        .map(|g| g.element.body().clone())
        .collect();
    let y = random_osp(&ctx.space, Parity::Even, 1.0, &mut rng);
    let vacuum = FockVector::monomial(FockIndex::vacuum(&ctx.space));
    let seed = cfg.seed.unwrap_or(0);
    out.records.push(Record::sampled(NAME, seminorm_chain_report(&vacuum, &y, 1, 16, seed, &even, basis)?, 16));
    Ok(out)
}
