use std::path::{Path, PathBuf};

use clap::ValueEnum;
use uavplan_core::optimal_normalized_altitude;
use uavplan_core::placement::{optimal_radius, optimal_recall_frequency, recall_frequency};
use uavplan_core::units::db_to_linear;

use super::{parse_radii, parse_values, Context, Output};
use crate::error::{CliError, CliResult};
use crate::format::{Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Circuit power, dB.
    #[value(name = "pc_db")]
    PcDb,
    /// User density, users/m².
    Density,
    /// Per-user rate, bit/s/Hz.
    Rate,
}

/// Where the optimal-locus table goes: `--locus`, else next to `--output`.
pub fn locus_path(explicit: Option<&Path>, output: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        output.map(|o| {
            let mut name = o.file_stem().unwrap_or_default().to_os_string();
            name.push(".locus.");
            name.push(o.extension().unwrap_or("csv".as_ref()));
            o.with_file_name(name)
        })
    })
}

/// Recall frequency over radii for each parameter value, plus the locus of
/// per-value optima.
pub fn run(
    ctx: &Context,
    scenario: &Path,
    param: SweepParam,
    values: &str,
    radii: &str,
    subregion: Option<&str>,
    locus: Option<PathBuf>,
) -> CliResult<Output> {
    let s = ctx.load(scenario)?;
    let values = parse_values(values, "values")?;
    let radii = parse_radii(radii)?;
    let base = match subregion {
        Some(label) => s
            .subregions
            .iter()
            .find(|x| x.label == label)
            .ok_or_else(|| CliError::input(format!("--subregion: no subregion labelled '{label}'")))?,
        None => &s.subregions[0],
    };
    let sol = optimal_normalized_altitude(&base.env, &s.bisect, &s.quad)?;

    let mut curves = Table::new(vec!["param_value", "r_b", "phi"]);
    let mut optima = Table::new(vec!["param_value", "r_b_star", "phi_star"]);
    for &v in &values {
        let mut sub = base.clone();
        let mut params = s.params;
        match param {
            SweepParam::PcDb => params.circuit_power = db_to_linear(v),
            SweepParam::Density => sub.density = v,
            SweepParam::Rate => params.rate_su = v,
        }
        params.validate().map_err(|e| CliError::input(format!("--values {v}: {e}")))?;
        if sub.density.is_nan() || sub.density < 0.0 {
            return Err(CliError::input(format!("--values {v}: density must be non-negative")));
        }
        for &r in &radii {
            curves.push(vec![v.into(), r.into(), recall_frequency(&sub, r, &params, &sol)?.into()]);
        }
        let label = |e: uavplan_core::Error| CliError::from(e.in_subregion(&sub.label));
        optima.push(vec![
            v.into(),
            optimal_radius(&sub, &params, &sol).map_err(label)?.into(),
            optimal_recall_frequency(&sub, &params, &sol).map_err(label)?.into(),
        ]);
    }
    let format = ctx.format_or(Format::Csv);
    let mut out = Output::body(curves.render(format));
    match locus {
        Some(path) => out.side_files.push((path, optima.render(format))),
        None => out.notes.push("optimal locus not written; pass --locus or --output".into()),
    }
    Ok(out)
}
