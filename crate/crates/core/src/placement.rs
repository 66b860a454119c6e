//! Per-subregion placement minimizing the UAV recall frequency.
//!
//! With the altitude pinned to `h = r_b·h_n*`, the recall frequency of a
//! subregion is
//!
//! ```text
//! Φ(r_b) = A/(π·E_b) · ( λ·(2^S − 1)·Γ*·r_b² + P_c / r_b² )
//! ```
//!
//! which is minimized where the two terms balance, i.e. where the transmit
//! power equals the circuit power. Subregions are independent, so the
//! area-wide optimum is the per-subregion optimum summed.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::altitude::{optimal_altitude_for_radius, optimal_normalized_altitude, BisectionConfig};
use crate::channel::Environment;
use crate::error::{Error, Result};
use crate::power::{total_transmit_power, KernelSolution, ServiceParams};
use crate::quadrature::QuadratureConfig;
use crate::units::{db_to_linear, DEFAULT_CARRIER_HZ};

/// A zone with one traffic density and one propagation environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Subregion {
    pub label: String,
    pub area_m2: f64,
    /// Mean user density, users/m².
    pub density: f64,
    pub env: Environment,
}

impl Subregion {
    pub fn new(label: impl Into<String>, area_m2: f64, density: f64, env: Environment) -> Result<Self> {
        if !(area_m2 > 0.0 && area_m2.is_finite()) {
            return Err(Error::invalid("area_m2", format!("must be positive, got {area_m2}")));
        }
        if !(density >= 0.0 && density.is_finite()) {
            return Err(Error::invalid("density", format!("must be non-negative, got {density}")));
        }
        Ok(Subregion {
            label: label.into(),
            area_m2,
            density,
            env,
        })
    }

    /// Builds a subregion from the ratio `A / (π·E_b)` instead of the area.
    pub fn from_area_over_pi_eb(
        label: impl Into<String>,
        area_over_pi_eb: f64,
        battery_j: f64,
        density: f64,
        env: Environment,
    ) -> Result<Self> {
        Self::new(label, area_over_pi_eb * PI * battery_j, density, env)
    }

    /// `A / (π·E_b)`, the prefactor of the recall frequency.
    pub fn area_over_pi_eb(&self, params: &ServiceParams) -> f64 {
        self.area_m2 / (PI * params.battery_j)
    }
}

/// Number of UAVs needed to tile `area_m2` with disks of radius `r_b`,
/// ignoring overlap. Fractional.
pub fn uav_count(area_m2: f64, r_b: f64) -> Result<f64> {
    if area_m2.is_nan() || area_m2 <= 0.0 {
        return Err(Error::domain("uav_count", format!("area must be positive, got {area_m2}")));
    }
    if r_b.is_nan() || r_b <= 0.0 {
        return Err(Error::domain("uav_count", format!("radius must be positive, got {r_b}")));
    }
    Ok(area_m2 / (PI * r_b * r_b))
}

/// Recall frequency of a subregion at radius `r_b` with the altitude at its
/// optimum for that radius.
pub fn recall_frequency(sub: &Subregion, r_b: f64, params: &ServiceParams, sol: &KernelSolution) -> Result<f64> {
    if !(r_b > 0.0 && r_b.is_finite()) {
        return Err(Error::domain("recall_frequency", format!("radius must be positive, got {r_b}")));
    }
    let r2 = r_b * r_b;
    let transmit = sub.density * params.rate_factor() * sol.gamma_at_opt * r2;
    Ok(sub.area_over_pi_eb(params) * (transmit + params.circuit_power / r2))
}

/// Optimal coverage radius. Zero when the circuit power is zero.
pub fn optimal_radius(sub: &Subregion, params: &ServiceParams, sol: &KernelSolution) -> Result<f64> {
    if params.circuit_power == 0.0 {
        return Ok(0.0);
    }
    let load = sub.density * params.rate_factor() * sol.gamma_at_opt;
    if load == 0.0 {
        return Err(Error::DegenerateDensity);
    }
    Ok((params.circuit_power / load).powf(0.25))
}

/// Minimum recall frequency, `2·A/(π·E_b)·λ·(2^S − 1)·R_b*²·Γ*`.
pub fn optimal_recall_frequency(sub: &Subregion, params: &ServiceParams, sol: &KernelSolution) -> Result<f64> {
    let r = optimal_radius(sub, params, sol)?;
    Ok(2.0 * sub.area_over_pi_eb(params) * sub.density * params.rate_factor() * r * r * sol.gamma_at_opt)
}

/// Lower bound `2·A/(π·E_b)·sqrt(λ·(2^S − 1)·P_c·Γ*)` on the recall frequency
/// at any radius.
pub fn recall_lower_bound(sub: &Subregion, params: &ServiceParams, sol: &KernelSolution) -> f64 {
    2.0 * sub.area_over_pi_eb(params)
        * (sub.density * params.rate_factor() * params.circuit_power * sol.gamma_at_opt).sqrt()
}

/// Memo of kernel solutions keyed by environment value. Safe to share
/// across threads.
#[derive(Debug, Default)]
pub struct KernelCache {
    solved: RwLock<HashMap<(String, [u64; 5]), KernelSolution>>,
}

impl KernelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_solve(&self, env: &Environment, cfg: &BisectionConfig, quad: &QuadratureConfig) -> Result<KernelSolution> {
        let key = env.cache_key();
        if let Some(sol) = self.solved.read().expect("kernel cache poisoned").get(&key) {
            return Ok(sol.clone());
        }
        let sol = optimal_normalized_altitude(env, cfg, quad)?;
        // Two threads may race to solve the same environment; the solver is
        // deterministic so either result is the same.
        self.solved
            .write()
            .expect("kernel cache poisoned")
            .entry(key)
            .or_insert_with(|| sol.clone());
        Ok(sol)
    }

    pub fn len(&self) -> usize {
        self.solved.read().expect("kernel cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubregionPlan {
    pub label: String,
    pub environment: String,
    pub density: f64,
    pub area_m2: f64,
    pub r_b_star: f64,
    pub h_star: f64,
    pub h_n_star: f64,
    pub gamma_at_opt: f64,
    /// Fractional UAV count; `None` for a zero-radius plan.
    pub n_uav: Option<f64>,
    /// `ceil(n_uav)`, for operators.
    pub n_uav_ceil: Option<u64>,
    /// Transmit power per UAV by quadrature at `(r_b_star, h_star)`.
    pub p_t: f64,
    pub p_s: f64,
    /// Flight time per battery, s.
    pub t_h: Option<f64>,
    /// Recalls per second.
    pub phi: f64,
    pub phi_lower_bound: f64,
    /// `|P_t − P_c| / P_c`; `None` when the circuit power is zero.
    pub power_balance_residual: Option<f64>,
    /// Circuit power is zero, so UAVs collapse onto the users.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementPlan {
    pub subregions: Vec<SubregionPlan>,
    pub phi_total: f64,
}

/// Plans every subregion and sums the recall frequency.
pub fn plan_area(
    subs: &[Subregion],
    params: &ServiceParams,
    bisect: &BisectionConfig,
    quad: &QuadratureConfig,
) -> Result<PlacementPlan> {
    plan_area_with_cache(subs, params, bisect, quad, &KernelCache::new())
}

pub fn plan_area_with_cache(
    subs: &[Subregion],
    params: &ServiceParams,
    bisect: &BisectionConfig,
    quad: &QuadratureConfig,
    cache: &KernelCache,
) -> Result<PlacementPlan> {
    if subs.is_empty() {
        return Err(Error::invalid("subregions", "at least one subregion is required"));
    }
    params.validate()?;
    let subregions = subs
        .par_iter()
        .map(|sub| plan_subregion(sub, params, bisect, quad, cache).map_err(|e| e.in_subregion(&sub.label)))
        .collect::<Result<Vec<_>>>()?;
    let phi_total = subregions.iter().map(|s| s.phi).sum();
    Ok(PlacementPlan { subregions, phi_total })
}

fn plan_subregion(
    sub: &Subregion,
    params: &ServiceParams,
    bisect: &BisectionConfig,
    quad: &QuadratureConfig,
    cache: &KernelCache,
) -> Result<SubregionPlan> {
    let sol = cache.get_or_solve(&sub.env, bisect, quad)?;
    let r_b = optimal_radius(sub, params, &sol)?;
    let base = SubregionPlan {
        label: sub.label.clone(),
        environment: sub.env.name().to_string(),
        density: sub.density,
        area_m2: sub.area_m2,
        r_b_star: r_b,
        h_star: optimal_altitude_for_radius(&sol, r_b),
        h_n_star: sol.h_n_star,
        gamma_at_opt: sol.gamma_at_opt,
        n_uav: None,
        n_uav_ceil: None,
        p_t: 0.0,
        p_s: params.circuit_power,
        t_h: None,
        phi: 0.0,
        phi_lower_bound: recall_lower_bound(sub, params, &sol),
        power_balance_residual: None,
        degenerate: true,
    };
    if r_b == 0.0 {
        return Ok(base);
    }
    let n = uav_count(sub.area_m2, r_b)?;
    let p_t = total_transmit_power(&sub.env, r_b, sub.density, base.h_star, params, quad)?;
    let p_s = p_t + params.circuit_power;
    Ok(SubregionPlan {
        n_uav: Some(n),
        n_uav_ceil: Some(n.ceil() as u64),
        p_t,
        p_s,
        t_h: Some(params.battery_j / p_s),
        phi: recall_frequency(sub, r_b, params, &sol)?,
        power_balance_residual: Some((p_t - params.circuit_power).abs() / params.circuit_power),
        degenerate: false,
        ..base
    })
}

/// Published reference radii for urban, λ = 0.1 /m², S = 1 bit/s/Hz,
/// f_c = 2.4 GHz, as `(circuit power dB, radius m)`.
pub const REFERENCE_RADII: [(f64, f64); 3] = [(100.0, 327.3), (110.0, 582.0), (120.0, 1035.0)];

/// Agreement within this relative error marks the unit convention confirmed.
pub const CALIBRATION_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationEntry {
    pub circuit_power_db: f64,
    pub reference_r_b: f64,
    pub computed_r_b: f64,
    /// `computed / reference`.
    pub ratio: f64,
}

/// Compares computed optimal radii with the published reference values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub convention: String,
    pub environment: String,
    pub density: f64,
    pub rate_su: f64,
    pub carrier_hz: f64,
    pub entries: Vec<CalibrationEntry>,
    /// "CONFIRMED" when every entry agrees within 1%, else "DISCREPANCY".
    pub status: String,
    /// Ratio of computed to reference radius at the first operating point.
    pub discrepancy_factor: f64,
    /// The same radius with the `(4π f_c / c)²` factor left out of the kernel.
    pub r_b_without_fspl_constant: f64,
}

pub fn calibration_report(bisect: &BisectionConfig, quad: &QuadratureConfig) -> Result<CalibrationReport> {
    let env = Environment::urban().with_carrier(DEFAULT_CARRIER_HZ)?;
    let sol = optimal_normalized_altitude(&env, bisect, quad)?;
    let density = 0.1;
    let rate_su = 1.0;
    let mut entries = Vec::with_capacity(REFERENCE_RADII.len());
    for (pc_db, reference) in REFERENCE_RADII {
        let params = ServiceParams::new(rate_su, db_to_linear(pc_db), 1.0)?;
        let sub = Subregion::from_area_over_pi_eb("calibration", 1.0, 1.0, density, env.clone())?;
        let computed = optimal_radius(&sub, &params, &sol)?;
        entries.push(CalibrationEntry {
            circuit_power_db: pc_db,
            reference_r_b: reference,
            computed_r_b: computed,
            ratio: computed / reference,
        });
    }
    let confirmed = entries.iter().all(|e| (e.ratio - 1.0).abs() <= CALIBRATION_TOLERANCE);
    let discrepancy_factor = entries[0].ratio;
    let r_b_without_fspl_constant = entries[0].computed_r_b * env.fspl_constant().powf(0.25);
    Ok(CalibrationReport {
        convention: "excess losses in dB converted to linear; FSPL constant (4*pi*f_c/c)^2 included; \
                     powers normalized by noise power (N0 = 1); A/(pi*E_b) = 1"
            .to_string(),
        environment: env.name().to_string(),
        density,
        rate_su,
        carrier_hz: env.carrier_hz(),
        entries,
        status: if confirmed { "CONFIRMED" } else { "DISCREPANCY" }.to_string(),
        discrepancy_factor,
        r_b_without_fspl_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Preset;
    use crate::power::scale_factor;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn urban_solution() -> KernelSolution {
        optimal_normalized_altitude(&Environment::urban(), &BisectionConfig::default(), &QuadratureConfig::default())
            .unwrap()
    }

    fn section_iv(density: f64, pc_db: f64) -> (Subregion, ServiceParams) {
        let params = ServiceParams::with_circuit_power_db(1.0, pc_db, 1.0).unwrap();
        let sub = Subregion::from_area_over_pi_eb("s", 1.0, 1.0, density, Environment::urban()).unwrap();
        (sub, params)
    }

    #[test]
    fn uav_count_definition() {
        assert!(rel(uav_count(PI * 1e4, 100.0).unwrap(), 1.0) < 1e-15);
        let n1 = uav_count(5e5, 80.0).unwrap();
        let n2 = uav_count(5e5, 40.0).unwrap();
        assert!(rel(n2, 4.0 * n1) < 1e-15);
        assert!(rel(uav_count(1e6, 327.3).unwrap(), 1e6 / (PI * 327.3 * 327.3)) < 1e-15);
        assert!(uav_count(0.0, 1.0).is_err());
        assert!(uav_count(1.0, 0.0).is_err());
    }

    #[test]
    fn subregion_validation() {
        let env = Environment::urban();
        assert!(Subregion::new("a", 0.0, 1.0, env.clone()).is_err());
        assert!(Subregion::new("a", 1.0, -1.0, env.clone()).is_err());
        let s = Subregion::from_area_over_pi_eb("a", 1.0, 5.0, 0.1, env).unwrap();
        let p = ServiceParams::new(1.0, 1.0, 5.0).unwrap();
        assert!(rel(s.area_over_pi_eb(&p), 1.0) < 1e-15);
    }

    #[test]
    fn recall_frequency_vanishes_without_load() {
        let sol = urban_solution();
        let params = ServiceParams::new(1.0, 0.0, 1.0).unwrap();
        let sub = Subregion::new("empty", 1e6, 0.0, Environment::urban()).unwrap();
        for r in [1.0, 100.0, 1e4] {
            assert_eq!(recall_frequency(&sub, r, &params, &sol).unwrap(), 0.0);
        }
    }

    #[test]
    fn bound_attained_at_optimum() {
        let sol = urban_solution();
        let (sub, params) = section_iv(0.1, 100.0);
        let r = optimal_radius(&sub, &params, &sol).unwrap();
        let at = recall_frequency(&sub, r, &params, &sol).unwrap();
        let bound = recall_lower_bound(&sub, &params, &sol);
        let closed = optimal_recall_frequency(&sub, &params, &sol).unwrap();
        assert!(rel(at, bound) < 1e-9);
        assert!(rel(closed, bound) < 1e-9);
        for f in [0.5, 0.9, 1.1, 2.0] {
            assert!(recall_frequency(&sub, f * r, &params, &sol).unwrap() > at);
        }
    }

    #[test]
    fn quarter_power_laws() {
        let sol = urban_solution();
        let (sub, p100) = section_iv(0.1, 100.0);
        let (_, p110) = section_iv(0.1, 110.0);
        let r100 = optimal_radius(&sub, &p100, &sol).unwrap();
        let r110 = optimal_radius(&sub, &p110, &sol).unwrap();
        assert!(rel(r110 / r100, 10f64.powf(0.25)) < 1e-12);

        let (dense, _) = section_iv(1.0, 100.0);
        let r_dense = optimal_radius(&dense, &p100, &sol).unwrap();
        assert!(rel(r_dense / r100, 10f64.powf(-0.25)) < 1e-12);
    }

    #[test]
    fn zero_circuit_power_collapses_radius() {
        let sol = urban_solution();
        let (sub, params) = section_iv(0.1, f64::NEG_INFINITY);
        assert_eq!(params.circuit_power, 0.0);
        assert_eq!(optimal_radius(&sub, &params, &sol).unwrap(), 0.0);
        assert_eq!(optimal_altitude_for_radius(&sol, 0.0), 0.0);
        assert_eq!(optimal_recall_frequency(&sub, &params, &sol).unwrap(), 0.0);
    }

    #[test]
    fn zero_density_with_circuit_power_is_degenerate() {
        let sol = urban_solution();
        let (sub, params) = section_iv(0.0, 100.0);
        assert_eq!(optimal_radius(&sub, &params, &sol), Err(Error::DegenerateDensity));
        assert!(optimal_recall_frequency(&sub, &params, &sol).is_err());
    }

    #[test]
    fn optimum_square_root_laws() {
        let sol = urban_solution();
        let (sub, p100) = section_iv(0.1, 100.0);
        let (_, p110) = section_iv(0.1, 110.0);
        let (dense, _) = section_iv(0.4, 100.0);
        let base = optimal_recall_frequency(&sub, &p100, &sol).unwrap();
        assert!(rel(optimal_recall_frequency(&sub, &p110, &sol).unwrap(), base * 10f64.sqrt()) < 1e-12);
        assert!(rel(optimal_recall_frequency(&dense, &p100, &sol).unwrap(), base * 2.0) < 1e-12);
    }

    #[test]
    fn plan_reports_balance_and_ratios() {
        let bisect = BisectionConfig::default();
        let quad = QuadratureConfig::default();
        let params = ServiceParams::with_circuit_power_db(1.0, 100.0, 1.0).unwrap();
        let subs: Vec<Subregion> = [0.1, 1.0, 5.0]
            .iter()
            .enumerate()
            .map(|(i, &d)| Subregion::from_area_over_pi_eb(format!("z{i}"), 1.0, 1.0, d, Environment::urban()).unwrap())
            .collect();
        let cache = KernelCache::new();
        let plan = plan_area_with_cache(&subs, &params, &bisect, &quad, &cache).unwrap();
        assert_eq!(cache.len(), 1);
        let r: Vec<f64> = plan.subregions.iter().map(|s| s.r_b_star).collect();
        assert!(rel(r[1] / r[0], 10f64.powf(-0.25)) < 1e-12);
        assert!(rel(r[2] / r[0], 50f64.powf(-0.25)) < 1e-12);
        for s in &plan.subregions {
            assert!(s.power_balance_residual.unwrap() < 1e-6);
            assert!(rel(s.p_s, s.p_t + params.circuit_power) < 1e-15);
            assert!(s.phi >= s.phi_lower_bound * (1.0 - 1e-9));
            assert!(rel(s.h_star, s.r_b_star * s.h_n_star) < 1e-15);
        }
        let sum: f64 = plan.subregions.iter().map(|s| s.phi).sum();
        assert_eq!(plan.phi_total, sum);
    }

    #[test]
    fn plan_is_separable_and_order_free() {
        let bisect = BisectionConfig::default();
        let quad = QuadratureConfig::default();
        let params = ServiceParams::with_circuit_power_db(1.0, 105.0, 2e4).unwrap();
        let subs = vec![
            Subregion::new("a", 2e6, 0.05, Environment::suburban()).unwrap(),
            Subregion::new("b", 5e5, 0.8, Environment::dense_urban()).unwrap(),
            Subregion::new("c", 1e6, 0.3, Environment::urban()).unwrap(),
        ];
        let plan = plan_area(&subs, &params, &bisect, &quad).unwrap();
        for (sub, rec) in subs.iter().zip(&plan.subregions) {
            let single = plan_area(std::slice::from_ref(sub), &params, &bisect, &quad).unwrap();
            assert_eq!(&single.subregions[0], rec);
        }
        let mut rev = subs.clone();
        rev.reverse();
        let plan_rev = plan_area(&rev, &params, &bisect, &quad).unwrap();
        assert!(rel(plan_rev.phi_total, plan.phi_total) < 1e-15);
    }

    #[test]
    fn plan_errors_carry_labels() {
        let params = ServiceParams::with_circuit_power_db(1.0, 100.0, 1.0).unwrap();
        let subs = vec![
            Subregion::new("ok", 1e6, 0.1, Environment::urban()).unwrap(),
            Subregion::new("ghost-town", 1e6, 0.0, Environment::urban()).unwrap(),
        ];
        let err = plan_area(&subs, &params, &BisectionConfig::default(), &QuadratureConfig::default()).unwrap_err();
        match &err {
            Error::Subregion { label, .. } => assert_eq!(label, "ghost-town"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(err.root(), &Error::DegenerateDensity);
        assert!(plan_area(&[], &params, &BisectionConfig::default(), &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn degenerate_plan_record() {
        let params = ServiceParams::new(1.0, 0.0, 1.0).unwrap();
        let subs = vec![Subregion::new("free", 1e6, 0.1, Environment::urban()).unwrap()];
        let plan = plan_area(&subs, &params, &BisectionConfig::default(), &QuadratureConfig::default()).unwrap();
        let s = &plan.subregions[0];
        assert!(s.degenerate);
        assert_eq!((s.r_b_star, s.h_star, s.phi, s.p_t), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(s.n_uav, None);
        assert_eq!(plan.phi_total, 0.0);
    }

    #[test]
    fn transmit_equals_circuit_power_at_optimum() {
        let quad = QuadratureConfig::default();
        for env in Preset::ALL.map(Environment::preset) {
            let sol = optimal_normalized_altitude(&env, &BisectionConfig::default(), &quad).unwrap();
            let params = ServiceParams::with_circuit_power_db(2.0, 95.0, 1.0).unwrap();
            let sub = Subregion::new("x", 1e6, 0.7, env.clone()).unwrap();
            let r = optimal_radius(&sub, &params, &sol).unwrap();
            let psi = scale_factor(r, sub.density, &params).unwrap();
            assert!(rel(psi * sol.gamma_at_opt, params.circuit_power) < 1e-12);
            let p_t = total_transmit_power(&env, r, sub.density, r * sol.h_n_star, &params, &quad).unwrap();
            assert!(rel(p_t, params.circuit_power) < 1e-6);
        }
    }

    #[test]
    fn calibration_report_shape() {
        let rep = calibration_report(&BisectionConfig::default(), &QuadratureConfig::default()).unwrap();
        assert_eq!(rep.entries.len(), 3);
        for w in rep.entries.windows(2) {
            assert!(rel(w[1].computed_r_b / w[0].computed_r_b, 10f64.powf(0.25)) < 1e-12);
        }
        assert!(rep.status == "CONFIRMED" || rep.status == "DISCREPANCY");
        assert_eq!(rep.discrepancy_factor, rep.entries[0].ratio);
    }
}
