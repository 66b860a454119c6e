use std::path::Path;

use serde::Serialize;
use uavplan_core::montecarlo::{empirical_recall_frequency, SimConfig};
use uavplan_core::placement::KernelCache;

use super::{plan, Context, Output};
use crate::error::{CliError, CliResult};
use crate::format::{to_json, Cell, Format, Table};

/// Agreement threshold, in standard errors.
pub const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Serialize)]
struct SubregionCheck {
    label: String,
    r_b_star: f64,
    h_star: f64,
    analytic_pt: f64,
    empirical_pt: f64,
    stderr_pt: f64,
    z_score: f64,
    analytic_phi: f64,
    empirical_phi: Option<f64>,
    stderr_phi: Option<f64>,
    mean_users: f64,
    expected_users: f64,
    /// Zero-radius plan, nothing to simulate.
    skipped: bool,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    trials: u64,
    seed: u64,
    z_limit: f64,
    all_pass: bool,
    subregions: Vec<SubregionCheck>,
}

/// Compares the planned transmit power of every subregion with a
/// Poisson-point-process simulation at the planned radius and altitude.
pub fn run(ctx: &Context, scenario: &Path, trials: Option<u64>, seed: Option<u64>) -> CliResult<Output> {
    let s = ctx.load(scenario)?;
    let sim = SimConfig {
        trials: trials.unwrap_or(s.sim.trials),
        seed: seed.unwrap_or(s.sim.seed),
        ..s.sim
    };
    if sim.trials < 1 {
        return Err(CliError::input("--trials: must be at least 1"));
    }
    let plan = plan::solve(&s)?;
    let cache = KernelCache::new();
    let mut checks = Vec::with_capacity(plan.subregions.len());
    for (sub, rec) in s.subregions.iter().zip(&plan.subregions) {
        if rec.degenerate {
            checks.push(SubregionCheck {
                label: rec.label.clone(),
                r_b_star: 0.0,
                h_star: 0.0,
                analytic_pt: 0.0,
                empirical_pt: 0.0,
                stderr_pt: 0.0,
                z_score: 0.0,
                analytic_phi: rec.phi,
                empirical_phi: None,
                stderr_phi: None,
                mean_users: 0.0,
                expected_users: 0.0,
                skipped: true,
                pass: true,
            });
            continue;
        }
        let sol = cache.get_or_solve(&sub.env, &s.bisect, &s.quad)?;
        let res = empirical_recall_frequency(sub, rec.r_b_star, &s.params, &sol, &sim)
            .map_err(|e| CliError::from(e.in_subregion(&sub.label)))?;
        let z = res.z_score(rec.p_t);
        checks.push(SubregionCheck {
            label: rec.label.clone(),
            r_b_star: rec.r_b_star,
            h_star: rec.h_star,
            analytic_pt: rec.p_t,
            empirical_pt: res.mean_pt,
            stderr_pt: res.stderr_pt,
            z_score: z,
            analytic_phi: rec.phi,
            empirical_phi: res.empirical_phi,
            stderr_phi: res.stderr_phi,
            mean_users: res.mean_users,
            expected_users: sub.density * std::f64::consts::PI * rec.r_b_star * rec.r_b_star,
            skipped: false,
            pass: z.abs() <= Z_LIMIT,
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    let body = match ctx.format_or(Format::Json) {
        Format::Json => to_json(&Report {
            trials: sim.trials,
            seed: sim.seed,
            z_limit: Z_LIMIT,
            all_pass,
            subregions: checks,
        }),
        format => {
            let mut t = Table::new(vec!["label", "analytic_pt", "empirical_pt", "stderr_pt", "z_score", "pass"]);
            for c in &checks {
                t.push(vec![
                    c.label.as_str().into(),
                    c.analytic_pt.into(),
                    c.empirical_pt.into(),
                    c.stderr_pt.into(),
                    c.z_score.into(),
                    Cell::Text(c.pass.to_string()),
                ]);
            }
            t.render(format)
        }
    };
    let mut out = Output::body(body);
    if !all_pass {
        out.exit_code = 5;
        out.notes.push(format!("Monte-Carlo check failed: some |z| > {Z_LIMIT}"));
    }
    Ok(out)
}
