use osp_core::sample::{random_osp, random_parity};
use osp_core::superalgebra::{
    cocycle_identity_residual, jacobi_residual, osp_norm, superbracket, OspElement, MEMBERSHIP_TOL, NORM_SCALE,
};
use osp_core::verify::IdentityReport;
use rayon::prelude::*;

use super::{num, worst, Context, Record, Suite, SuiteOutput, Table};

const NAME: &str = "algebra";

pub(super) fn run(ctx: &Context) -> osp_core::Result<SuiteOutput> {
    let tol = &ctx.config.tolerances;
    let n = ctx.config.samples.triples;
    let mut rng = ctx.rng(Suite::Algebra);
    let triples: Vec<[OspElement; 3]> = (0..n)
        .map(|_| std::array::from_fn(|_| random_osp(&ctx.space, random_parity(&mut rng), 1.0, &mut rng)))
        .collect();

    struct Row {
        jacobi: f64,
        cocycle: f64,
        membership: f64,
        ratio: f64,
    }
    let rows: Vec<Row> = triples
        .par_iter()
        .map(|[x, y, z]| -> osp_core::Result<Row> {
            let b = superbracket(x, y)?;
            Ok(Row {
                jacobi: jacobi_residual(x, y, z)?,
                cocycle: cocycle_identity_residual(x, y, z)?,
                membership: b.residual(),
                ratio: osp_norm(&b) / (osp_norm(x) * osp_norm(y)),
            })
        })
        .collect::<osp_core::Result<_>>()?;

    let mut table = Table::new("algebra_triples", vec!["sample", "jacobi", "cocycle_identity", "bracket_norm_ratio"]);
    for (i, r) in rows.iter().enumerate() {
        table.push(vec![i.to_string(), num(r.jacobi), num(r.cocycle), num(r.ratio)]);
    }
    let ratio = worst(rows.iter().map(|r| r.ratio));
    let records = vec![
        Record::sampled(NAME, IdentityReport::new("graded_jacobi", worst(rows.iter().map(|r| r.jacobi)), tol.jacobi, 0), n),
        Record::sampled(
            NAME,
            IdentityReport::new("cocycle_identity", worst(rows.iter().map(|r| r.cocycle)), tol.cocycle_identity, 0),
            n,
        ),
        Record::sampled(
            NAME,
            IdentityReport::new("bracket_membership", worst(rows.iter().map(|r| r.membership)), MEMBERSHIP_TOL, 0),
            n,
        ),
        Record::sampled(
            NAME,
            IdentityReport::new("bracket_norm_constant", ratio, NORM_SCALE, 0)
                .with_note(format!("max ‖[x,y]‖'/(‖x‖'‖y‖') = {ratio:?}; the norm is scaled by {NORM_SCALE}")),
            n,
        ),
    ];
    Ok(SuiteOutput { records, tables: vec![table] })
}
