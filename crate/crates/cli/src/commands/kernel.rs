use std::path::Path;

use uavplan_core::power::{kernel_gamma, kernel_gamma_derivative};

use super::{parse_range, Context, Output};
use crate::error::CliResult;
use crate::format::{Format, Table};

/// Tabulates `Γ(h_n)` and `dΓ/dh_n` over a range of normalized altitudes.
pub fn run(ctx: &Context, env: &str, range: &str, scenario: Option<&Path>) -> CliResult<Output> {
    let scenario = scenario.map(|p| ctx.load(p)).transpose()?;
    let env = ctx.environment(env, scenario.as_ref())?;
    let grid = parse_range(range, "range")?;
    let quad = scenario.as_ref().map_or_else(|| ctx.quad(), |s| s.quad);
    let mut t = Table::new(vec!["h_n", "gamma", "dgamma_dhn"]);
    for h in grid {
        t.push(vec![
            h.into(),
            kernel_gamma(&env, h, &quad)?.into(),
            kernel_gamma_derivative(&env, h, &quad)?.into(),
        ]);
    }
    Ok(Output::body(t.render(ctx.format_or(Format::Csv))))
}
