//! Expected transmit power over a coverage disk.
//!
//! The total power needed to serve a Poisson field of users on a disk of
//! radius `r_b` factors into a coverage scale `λ·r_b⁴·(2^S − 1)` times a
//! kernel `Γ(h / r_b)` that depends on the environment alone. All powers are
//! linear ratios to the noise power.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{average_path_loss, los_nlos_product, Environment, LinkGeometry};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::units::{db_to_linear, rate_factor};

/// Service requirements and UAV energy budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceParams {
    /// Per-user spectral rate, bit/s/Hz.
    pub rate_su: f64,
    /// On-board circuit power, linear ratio to noise power.
    pub circuit_power: f64,
    /// Battery capacity, J.
    pub battery_j: f64,
    /// All powers are ratios to the noise power (N₀ = 1).
    pub noise_normalized: bool,
}

impl ServiceParams {
    pub fn new(rate_su: f64, circuit_power: f64, battery_j: f64) -> Result<Self> {
        let params = ServiceParams {
            rate_su,
            circuit_power,
            battery_j,
            noise_normalized: true,
        };
        params.validate()?;
        Ok(params)
    }

    /// Circuit power given in dB relative to the noise power.
    pub fn with_circuit_power_db(rate_su: f64, circuit_power_db: f64, battery_j: f64) -> Result<Self> {
        Self::new(rate_su, db_to_linear(circuit_power_db), battery_j)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate_su >= 0.0 && self.rate_su.is_finite()) {
            return Err(Error::invalid(
                "rate_su",
                format!("must be non-negative, got {}", self.rate_su),
            ));
        }
        if !(self.circuit_power >= 0.0 && self.circuit_power.is_finite()) {
            return Err(Error::invalid(
                "circuit_power",
                format!("must be non-negative, got {}", self.circuit_power),
            ));
        }
        if !(self.battery_j > 0.0 && self.battery_j.is_finite()) {
            return Err(Error::invalid(
                "battery_j",
                format!("must be positive, got {}", self.battery_j),
            ));
        }
        Ok(())
    }

    /// `2^S − 1`.
    pub fn rate_factor(&self) -> f64 {
        rate_factor(self.rate_su)
    }
}

/// Optimal normalized altitude of an environment and the kernel value there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSolution {
    /// Slope of the optimal-altitude line `h* = h_n*·r_b`.
    pub h_n_star: f64,
    pub gamma_at_opt: f64,
    pub env_name: String,
    /// Final bisection interval `[lo, hi]` (both equal for a boundary optimum).
    pub bracket: (f64, f64),
    /// Upper end of the search range after bracket expansion.
    pub search_upper: f64,
}

/// Expected power to serve one user at `geom`.
pub fn per_user_power(env: &Environment, geom: LinkGeometry, params: &ServiceParams) -> Result<f64> {
    Ok(average_path_loss(env, geom)? * params.rate_factor())
}

/// Expected total transmit power of one UAV covering a disk of radius `r_b`
/// at altitude `h`, by direct quadrature over the disk.
pub fn total_transmit_power(
    env: &Environment,
    r_b: f64,
    density: f64,
    h: f64,
    params: &ServiceParams,
    quad: &QuadratureConfig,
) -> Result<f64> {
    check_radius("total_transmit_power", r_b)?;
    check_density("total_transmit_power", density)?;
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::domain("total_transmit_power", format!("altitude must be non-negative, got {h}")));
    }
    let rf = params.rate_factor();
    if density == 0.0 || rf == 0.0 {
        return Ok(0.0);
    }
    let c = env.coeffs();
    let ring = integrate(|r| 2.0 * PI * r * c.average_path_loss(r, h), 0.0, r_b, quad)?;
    Ok(density * ring * rf)
}

/// Kernel `Γ(h_n) = ∫₀¹ 2πr·L̄(r, h_n) dr`: the transmit power at unit
/// radius, density and rate factor.
pub fn kernel_gamma(env: &Environment, h_n: f64, quad: &QuadratureConfig) -> Result<f64> {
    check_normalized_altitude("kernel_gamma", h_n)?;
    let c = env.coeffs();
    integrate(|r| 2.0 * PI * r * c.average_path_loss(r, h_n), 0.0, 1.0, quad)
}

/// Analytic `dΓ/dh_n`.
pub fn kernel_gamma_derivative(env: &Environment, h_n: f64, quad: &QuadratureConfig) -> Result<f64> {
    check_normalized_altitude("kernel_gamma_derivative", h_n)?;
    let c = env.coeffs();
    let delta_eta = c.eta_los - c.eta_nlos;
    let slope = 180.0 * c.b / PI;
    integrate(
        |r| {
            let d2 = r * r + h_n * h_n;
            let q = c.nlos_odds(r, h_n);
            let dp0 = slope * r * los_nlos_product(q) / d2;
            let inner = 2.0 * h_n * c.mean_excess_from_odds(q) + d2 * dp0 * delta_eta;
            c.fspl * 2.0 * PI * r * inner
        },
        0.0,
        1.0,
        quad,
    )
}

/// Coverage scale `ψ = λ·r_b⁴·(2^S − 1)`.
pub fn scale_factor(r_b: f64, density: f64, params: &ServiceParams) -> Result<f64> {
    check_radius("scale_factor", r_b)?;
    check_density("scale_factor", density)?;
    Ok(density * r_b.powi(4) * params.rate_factor())
}

fn check_radius(op: &'static str, r_b: f64) -> Result<()> {
    if r_b > 0.0 && r_b.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("coverage radius must be positive, got {r_b}")))
    }
}

fn check_density(op: &'static str, density: f64) -> Result<()> {
    if density >= 0.0 && density.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("user density must be non-negative, got {density}")))
    }
}

fn check_normalized_altitude(op: &'static str, h_n: f64) -> Result<()> {
    if h_n >= 0.0 && h_n.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("normalized altitude must be non-negative, got {h_n}")))
    }
}
