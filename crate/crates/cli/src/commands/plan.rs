use std::path::Path;

use serde::Serialize;
use uavplan_core::placement::{calibration_report, CalibrationReport};
use uavplan_core::{plan_area, PlacementPlan};

use super::{Context, Output};
use crate::error::CliResult;
use crate::format::{fmt_num, to_json, Cell, Format, Table};
use crate::scenario::Scenario;

#[derive(Debug, Serialize)]
struct Settings {
    carrier_hz: f64,
    rate_su: f64,
    circuit_power_db: f64,
    battery_j: f64,
    epsilon: f64,
    rel_tol: f64,
}

#[derive(Debug, Serialize)]
struct PlanReport<'a> {
    settings: Settings,
    plan: &'a PlacementPlan,
    calibration: &'a CalibrationReport,
}

/// Solves the scenario; shared with commands that build on the plan.
pub fn solve(s: &Scenario) -> CliResult<PlacementPlan> {
    Ok(plan_area(&s.subregions, &s.params, &s.bisect, &s.quad)?)
}

pub fn plan_table(plan: &PlacementPlan) -> Table {
    let mut t = Table::new(vec![
        "label",
        "environment",
        "r_b_star",
        "h_star",
        "h_n_star",
        "n_uav",
        "n_uav_ceil",
        "p_t",
        "p_s",
        "t_h",
        "phi",
        "phi_lower_bound",
        "power_balance_residual",
    ]);
    for s in &plan.subregions {
        t.push(vec![
            s.label.as_str().into(),
            s.environment.as_str().into(),
            s.r_b_star.into(),
            s.h_star.into(),
            s.h_n_star.into(),
            s.n_uav.into(),
            s.n_uav_ceil.map_or(Cell::Empty, Cell::Int),
            s.p_t.into(),
            s.p_s.into(),
            s.t_h.into(),
            s.phi.into(),
            s.phi_lower_bound.into(),
            s.power_balance_residual.into(),
        ]);
    }
    t
}

pub fn run(ctx: &Context, scenario: &Path) -> CliResult<Output> {
    let s = ctx.load(scenario)?;
    let plan = solve(&s)?;
    let calibration = calibration_report(&s.bisect, &s.quad)?;
    let body = match ctx.format_or(Format::Json) {
        Format::Json => to_json(&PlanReport {
            settings: Settings {
                carrier_hz: s.carrier_hz,
                rate_su: s.params.rate_su,
                circuit_power_db: s.circuit_power_db,
                battery_j: s.params.battery_j,
                epsilon: s.bisect.epsilon,
                rel_tol: s.quad.rel_tol,
            },
            plan: &plan,
            calibration: &calibration,
        }),
        Format::Csv => plan_table(&plan).to_csv(),
        Format::Table => {
            let mut out = plan_table(&plan).to_aligned();
            out.push_str(&format!("\nphi_total  {}\n", fmt_num(plan.phi_total)));
            out.push_str(&format!(
                "calibration ({}, density {}, rate {}): {}\n",
                calibration.environment,
                fmt_num(calibration.density),
                fmt_num(calibration.rate_su),
                calibration.status
            ));
            for e in &calibration.entries {
                out.push_str(&format!(
                    "  P_c {} dB: computed r_b* {} m, reference {} m, ratio {}\n",
                    fmt_num(e.circuit_power_db),
                    fmt_num(e.computed_r_b),
                    fmt_num(e.reference_r_b),
                    fmt_num(e.ratio)
                ));
            }
            out
        }
    };
    Ok(Output::body(body))
}
