pub mod contour;
pub mod kernel;
pub mod layout;
pub mod plan;
pub mod simulate;
pub mod sweep;

use std::path::{Path, PathBuf};

use uavplan_core::units::DEFAULT_CARRIER_HZ;
use uavplan_core::{Environment, QuadratureConfig};

use crate::error::{CliError, CliResult};
use crate::format::Format;
use crate::scenario::{resolve_preset, Scenario};

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Output {
    /// Main report, written to `--output` or stdout.
    pub body: String,
    /// Extra files to write next to the main report.
    pub side_files: Vec<(PathBuf, String)>,
    /// Human-readable remarks for stderr.
    pub notes: Vec<String>,
    pub exit_code: u8,
}

impl Output {
    pub fn body(body: String) -> Self {
        Output { body, ..Default::default() }
    }
}

/// Settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Context {
    pub format: Option<Format>,
    /// Overrides the quadrature tolerance from files and defaults.
    pub quad_tol: Option<f64>,
}

impl Context {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn load(&self, path: &Path) -> CliResult<Scenario> {
        let mut s = Scenario::load(path)?;
        if let Some(tol) = self.quad_tol {
            s.quad.rel_tol = tol;
        }
        Ok(s)
    }

    pub fn quad(&self) -> QuadratureConfig {
        let mut q = QuadratureConfig::default();
        if let Some(tol) = self.quad_tol {
            q.rel_tol = tol;
        }
        q
    }

    /// Resolves `--env`, against the scenario's environments when one is given.
    pub fn environment(&self, name: &str, scenario: Option<&Scenario>) -> CliResult<Environment> {
        match scenario {
            Some(s) => s.environment(name),
            None => resolve_preset(name, DEFAULT_CARRIER_HZ),
        }
    }
}

/// Parses `a:b:step` into `a, a + step, …` up to `b` inclusive.
pub fn parse_range(spec: &str, flag: &str) -> CliResult<Vec<f64>> {
    let fail = |detail: &str| CliError::input(format!("--{flag} '{spec}': {detail}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, step] = parts[..] else {
        return Err(fail("expected start:stop:step"));
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| fail("bounds must be numbers"));
    let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
    if !(a.is_finite() && b.is_finite() && step.is_finite()) {
        return Err(fail("bounds must be finite"));
    }
    if a < 0.0 {
        return Err(fail("start must be non-negative"));
    }
    if step.is_nan() || step <= 0.0 {
        return Err(fail("step must be positive"));
    }
    if b < a {
        return Err(fail("stop must not be below start"));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize + 1;
    if n > 10_000_000 {
        return Err(fail("too many points"));
    }
    Ok((0..n)
        .map(|i| {
            let x = a + i as f64 * step;
            if (x - b).abs() <= 1e-9 * step {
                b
            } else {
                x
            }
        })
        .collect())
}

/// Like [`parse_range`] but rejecting a zero start, for radii.
pub fn parse_radii(spec: &str) -> CliResult<Vec<f64>> {
    let r = parse_range(spec, "radii")?;
    if r[0] <= 0.0 {
        return Err(CliError::input(format!("--radii '{spec}': radii must be positive")));
    }
    Ok(r)
}

/// Parses a comma-separated list of numbers.
pub fn parse_values(spec: &str, flag: &str) -> CliResult<Vec<f64>> {
    let values = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|_| CliError::input(format!("--{flag} '{spec}': expected comma-separated numbers")))?;
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::input(format!("--{flag} '{spec}': values must be finite")));
    }
    Ok(values)
}
