use osp_core::generators::generator_family;
use osp_core::superalgebra::Parity;
use osp_core::verify::restrict;

use super::{Context, Record, SuiteOutput};

const NAME: &str = "restriction";

/// Restricts the generator family to its even part and re-runs the axioms.
pub(super) fn run(ctx: &Context) -> osp_core::Result<SuiteOutput> {
    let basis = ctx.basis()?;
    let family = generator_family(&ctx.space);
    let even: Vec<&str> =
        family.iter().filter(|g| g.element.parity() == Parity::Even).map(|g| g.name.as_str()).collect();
    let res = restrict(&family, &even, basis, ctx.config.seed.unwrap_or(0))?;
    let records = res.reports.into_iter().map(|r| Record::sampled(NAME, r, even.len())).collect();
    Ok(SuiteOutput { records, tables: Vec::new() })
}
