use std::path::Path;

use uavplan_core::layout::HEX_TO_DISK_COUNT_RATIO;
use uavplan_core::hex_lattice;

use super::{plan, Context, Output};
use crate::error::{CliError, CliResult};
use crate::format::{fmt_num, Format, Table};

/// UAV disk centers on a hexagonal lattice inside each subregion's rectangle.
pub fn run(ctx: &Context, scenario: &Path) -> CliResult<Output> {
    let s = ctx.load(scenario)?;
    if let Some(i) = s.geometry.iter().position(Option::is_none) {
        return Err(CliError::input(format!("subregions[{i}].geometry: required by layout")));
    }
    let plan = plan::solve(&s)?;
    let mut t = Table::new(vec!["label", "cx", "cy", "r_b", "h"]);
    let mut notes = vec![format!(
        "hexagonal packing of pitch 2*r_b holds about pi/(2*sqrt(3)) = {} of the count A/(pi*r_b^2)",
        fmt_num(HEX_TO_DISK_COUNT_RATIO)
    )];
    for (rec, rect) in plan.subregions.iter().zip(&s.geometry) {
        let rect = rect.expect("checked above");
        let centers = hex_lattice(&rect, rec.r_b_star)?;
        let ratio_count = if rec.r_b_star > 0.0 {
            rect.area() / (std::f64::consts::PI * rec.r_b_star * rec.r_b_star)
        } else {
            0.0
        };
        notes.push(format!(
            "{}: {} lattice disks, ratio count {}",
            rec.label,
            centers.len(),
            fmt_num(ratio_count)
        ));
        for (cx, cy) in centers {
            t.push(vec![rec.label.as_str().into(), cx.into(), cy.into(), rec.r_b_star.into(), rec.h_star.into()]);
        }
    }
    let mut out = Output::body(t.render(ctx.format_or(Format::Csv)));
    out.notes = notes;
    Ok(out)
}
