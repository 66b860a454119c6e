//! `uavplan` command-line front end.
//!
//! Exit codes: 0 ok, 2 input error, 3 solver error, 4 infeasible,
//! 5 validation failure.

pub mod commands;
pub mod error;
pub mod format;
pub mod scenario;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::sweep::SweepParam;
use commands::{Context, Output};
use error::{CliError, CliResult};
use format::Format;

/// Environment variable overriding the quadrature relative tolerance.
pub const QUAD_TOL_VAR: &str = "UAVPLAN_QUAD_TOL";

#[derive(Debug, Parser)]
#[command(name = "uavplan", version, about = "Energy-optimal placement of UAV base stations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal radius, altitude and recall frequency per subregion.
    Plan { scenario: PathBuf },
    /// Kernel and its derivative over normalized altitudes.
    Kernel {
        #[arg(long)]
        env: String,
        /// start:stop:step
        #[arg(long, default_value = "0:2:0.01")]
        range: String,
        /// Scenario supplying custom environments and carrier frequency.
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Recall frequency against radius for several parameter values.
    Sweep {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated parameter values.
        #[arg(long)]
        values: String,
        /// start:stop:step, meters.
        #[arg(long)]
        radii: String,
        /// Subregion to sweep; defaults to the first.
        #[arg(long)]
        subregion: Option<String>,
        /// Where to write the optimal-locus table.
        #[arg(long)]
        locus: Option<PathBuf>,
    },
    /// Iso-power altitude curves against radius.
    Contour {
        #[arg(long)]
        env: String,
        /// Transmit power, dB relative to noise.
        #[arg(long, allow_negative_numbers = true)]
        power_db: f64,
        /// start:stop:step, meters.
        #[arg(long)]
        radii: String,
        #[arg(long, default_value_t = 0.1)]
        density: f64,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Monte-Carlo check of the planned transmit power.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Hexagonal layout of UAV disk centers.
    Layout { scenario: PathBuf },
}

/// Parses the quadrature tolerance override.
pub fn parse_quad_tol(value: Option<&str>) -> CliResult<Option<f64>> {
    value
        .map(|v| match v.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::input(format!("{QUAD_TOL_VAR}: expected a positive number, got '{v}'"))),
        })
        .transpose()
}

/// Runs a parsed command line.
pub fn run(cli: &Cli, quad_tol: Option<f64>) -> CliResult<Output> {
    let ctx = Context {
        format: cli.format,
        quad_tol,
    };
    match &cli.command {
        Command::Plan { scenario } => commands::plan::run(&ctx, scenario),
        Command::Kernel { env, range, scenario } => commands::kernel::run(&ctx, env, range, scenario.as_deref()),
        Command::Sweep {
            scenario,
            param,
            values,
            radii,
            subregion,
            locus,
        } => {
            let locus = commands::sweep::locus_path(locus.as_deref(), cli.output.as_deref());
            commands::sweep::run(&ctx, scenario, *param, values, radii, subregion.as_deref(), locus)
        }
        Command::Contour {
            env,
            power_db,
            radii,
            density,
            rate,
            scenario,
        } => commands::contour::run(&ctx, env, *power_db, radii, *density, *rate, scenario.as_deref()),
        Command::Simulate { scenario, trials, seed } => commands::simulate::run(&ctx, scenario, *trials, *seed),
        Command::Layout { scenario } => commands::layout::run(&ctx, scenario),
    }
}
