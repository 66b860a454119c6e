use std::path::Path;

use uavplan_core::altitude::{iso_power_altitude_curve, max_feasible_radius};
use uavplan_core::units::db_to_linear;
use uavplan_core::{optimal_normalized_altitude, ServiceParams};

use super::{parse_radii, Context, Output};
use crate::error::{CliError, CliResult};
use crate::format::{fmt_num, Format, Table};
use crate::scenario::Scenario;

/// Altitudes that spend exactly `power_db` of transmit power, per radius.
///
/// The largest feasible radius, where the two altitudes meet, is added as a
/// row when it falls inside the grid.
pub fn run(
    ctx: &Context,
    env: &str,
    power_db: f64,
    radii: &str,
    density: f64,
    rate: f64,
    scenario: Option<&Path>,
) -> CliResult<Output> {
    let scenario: Option<Scenario> = scenario.map(|p| ctx.load(p)).transpose()?;
    let env = ctx.environment(env, scenario.as_ref())?;
    if !power_db.is_finite() {
        return Err(CliError::input("--power-db: must be finite"));
    }
    if !(density > 0.0 && density.is_finite()) {
        return Err(CliError::input("--density: must be positive"));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(CliError::input("--rate: must be positive"));
    }
    let mut radii = parse_radii(radii)?;
    let (bisect, quad) = scenario.as_ref().map_or_else(|| (Default::default(), ctx.quad()), |s| (s.bisect, s.quad));
    let params = ServiceParams::new(rate, 0.0, 1.0)?;
    let sol = optimal_normalized_altitude(&env, &bisect, &quad)?;

    let r_max = max_feasible_radius(&sol, db_to_linear(power_db), density, &params);
    let (lo, hi) = (radii[0], radii[radii.len() - 1]);
    if r_max >= lo && r_max <= hi && !radii.contains(&r_max) {
        let at = radii.partition_point(|&r| r < r_max);
        radii.insert(at, r_max);
    }

    let points = iso_power_altitude_curve(&env, &sol, power_db, density, &params, &radii, &quad)?;
    if points.is_empty() {
        return Err(CliError::Infeasible(format!(
            "no radius in [{}, {}] m can be served with {} dB; the largest feasible radius is {} m",
            fmt_num(lo),
            fmt_num(hi),
            fmt_num(power_db),
            fmt_num(r_max)
        )));
    }
    let mut t = Table::new(vec!["r_b", "h_low", "h_high", "h_opt"]);
    for p in &points {
        t.push(vec![p.r_b.into(), p.h_low.into(), p.h_high.into(), p.h_opt.into()]);
    }
    Ok(Output::body(t.render(ctx.format_or(Format::Csv))))
}
