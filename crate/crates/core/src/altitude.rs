//! Optimal hovering altitude.
//!
//! Transmit power at radius `r_b` and altitude `h` is `ψ·Γ(h / r_b)`, so the
//! best altitude is `r_b·h_n*` where `h_n*` minimizes the kernel `Γ`. The
//! minimizer is found by growing a bracket by decades until `dΓ/dh_n`
//! changes sign, then bisecting on the sign of the derivative.

use serde::{Deserialize, Serialize};

use crate::channel::Environment;
use crate::error::{Error, Result};
use crate::power::{kernel_gamma, kernel_gamma_derivative, scale_factor, KernelSolution, ServiceParams};
use crate::quadrature::QuadratureConfig;
use crate::units::db_to_linear;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionConfig {
    /// Stop once `|dΓ/dh_n| / Γ` falls below this.
    pub epsilon: f64,
    /// Number of times the upper bracket may grow tenfold.
    pub max_expansions: u32,
    /// Stop once the bracket is narrower than `width_tol` times its upper end.
    pub width_tol: f64,
    /// Confirm the result against a grid sweep of `Γ` over the search range.
    pub verify_global: bool,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig {
            epsilon: 1e-3,
            max_expansions: 20,
            width_tol: 1e-9,
            verify_global: false,
        }
    }
}

impl BisectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::invalid("epsilon", format!("must be positive, got {}", self.epsilon)));
        }
        if self.max_expansions < 1 {
            return Err(Error::invalid("max_expansions", "must be at least 1"));
        }
        if self.width_tol.is_nan() || self.width_tol <= 0.0 {
            return Err(Error::invalid("width_tol", format!("must be positive, got {}", self.width_tol)));
        }
        Ok(())
    }
}

/// Number of steps in the verification sweep over `[0, h_max]`.
const VERIFY_GRID_STEPS: usize = 1000;

/// Finds the environment's optimal normalized altitude `h_n*`.
pub fn optimal_normalized_altitude(
    env: &Environment,
    cfg: &BisectionConfig,
    quad: &QuadratureConfig,
) -> Result<KernelSolution> {
    let sol = minimize_by_derivative_sign(
        |h| kernel_gamma_derivative(env, h, quad),
        |h| kernel_gamma(env, h, quad),
        env.name(),
        cfg,
    )?;
    if cfg.verify_global {
        verify_global_minimizer(env, &sol, quad)?;
    }
    Ok(sol)
}

/// Bracket expansion by decades from `[0, 1]` followed by bisection on the
/// sign of `deriv`, stopping on `|deriv| / value < epsilon` or bracket width.
pub fn minimize_by_derivative_sign<D, V>(deriv: D, value: V, label: &str, cfg: &BisectionConfig) -> Result<KernelSolution>
where
    D: Fn(f64) -> Result<f64>,
    V: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    let d_zero = deriv(0.0)?;
    if d_zero >= 0.0 {
        // Nothing is gained by climbing: the optimum sits on the ground.
        return Ok(KernelSolution {
            h_n_star: 0.0,
            gamma_at_opt: value(0.0)?,
            env_name: label.to_string(),
            bracket: (0.0, 0.0),
            search_upper: 0.0,
        });
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut expansions = 0;
    while deriv(hi)? * d_zero >= 0.0 {
        if expansions >= cfg.max_expansions {
            return Err(Error::BracketFailure {
                env: label.to_string(),
                h_max: hi,
            });
        }
        hi *= 10.0;
        expansions += 1;
    }
    let search_upper = hi;

    let mut mid;
    let mut value_mid;
    loop {
        mid = 0.5 * (lo + hi);
        let d_mid = deriv(mid)?;
        value_mid = value(mid)?;
        if d_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if d_mid > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if d_mid.abs() / value_mid < cfg.epsilon || hi - lo <= cfg.width_tol * hi {
            break;
        }
    }

    Ok(KernelSolution {
        h_n_star: mid,
        gamma_at_opt: value_mid,
        env_name: label.to_string(),
        bracket: (lo, hi),
        search_upper,
    })
}

/// Checks by grid sweep that no point of `[0, search_upper]` more than one
/// grid step away from `h_n*` has a smaller kernel value.
pub fn verify_global_minimizer(env: &Environment, sol: &KernelSolution, quad: &QuadratureConfig) -> Result<()> {
    let upper = sol.search_upper.max(1.0);
    let step = upper / VERIFY_GRID_STEPS as f64;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..=VERIFY_GRID_STEPS {
        let h = i as f64 * step;
        let g = kernel_gamma(env, h, quad)?;
        if g < best.1 {
            best = (h, g);
        }
    }
    if (best.0 - sol.h_n_star).abs() > step && best.1 < sol.gamma_at_opt {
        return Err(Error::NotGlobalMinimizer {
            env: env.name().to_string(),
            found: sol.h_n_star,
            grid_argmin: best.0,
        });
    }
    Ok(())
}

/// Optimal hovering altitude in meters for coverage radius `r_b`.
///
/// Panics if `r_b` is negative.
pub fn optimal_altitude_for_radius(sol: &KernelSolution, r_b: f64) -> f64 {
    assert!(r_b >= 0.0, "coverage radius must be non-negative, got {r_b}");
    r_b * sol.h_n_star
}

/// Altitudes at which a UAV of radius `r_b` spends exactly a given power.
///
/// `h_low..=h_high` is the set of altitudes whose transmit power does not
/// exceed the target; `h_low` is clamped to 0 when even ground level is
/// cheap enough, in which case `roots` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsoPowerPoint {
    pub r_b: f64,
    pub h_low: f64,
    pub h_high: f64,
    pub h_opt: f64,
    pub roots: u8,
}

/// Relative slack below `Γ(h_n*)` still treated as touching the minimum.
const TANGENCY_TOL: f64 = 1e-9;

/// Largest radius whose minimum transmit power does not exceed `power`.
pub fn max_feasible_radius(sol: &KernelSolution, power: f64, density: f64, params: &ServiceParams) -> f64 {
    (power / (density * params.rate_factor() * sol.gamma_at_opt)).powf(0.25)
}

/// Solves `P_t(r_b, h) = power` for `h` on both sides of the optimum.
/// `power` is linear (noise-normalized).
pub fn iso_power_altitudes(
    env: &Environment,
    sol: &KernelSolution,
    power: f64,
    density: f64,
    params: &ServiceParams,
    r_b: f64,
    quad: &QuadratureConfig,
) -> Result<IsoPowerPoint> {
    let psi = scale_factor(r_b, density, params)?;
    if psi == 0.0 {
        return Err(Error::invalid("density", "zero scale factor; transmit power is identically zero"));
    }
    let level = power / psi;
    let g_star = sol.gamma_at_opt;
    let h_opt = optimal_altitude_for_radius(sol, r_b);
    if level < g_star * (1.0 - TANGENCY_TOL) {
        return Err(Error::NoSolution {
            power,
            r_b,
            max_radius: max_feasible_radius(sol, power, density, params),
        });
    }
    if level <= g_star {
        return Ok(IsoPowerPoint {
            r_b,
            h_low: h_opt,
            h_high: h_opt,
            h_opt,
            roots: 1,
        });
    }

    let excess = |h: f64| kernel_gamma(env, h, quad).map(|g| g - level);
    let opt = sol.h_n_star;

    let (h_low, roots) = if excess(0.0)? <= 0.0 {
        (0.0, 1)
    } else {
        (bisect_crossing(&excess, 0.0, opt)?, 2)
    };

    let mut upper = opt.max(1e-3) * 2.0;
    while excess(upper)? <= 0.0 {
        upper *= 2.0;
        if !upper.is_finite() {
            return Err(Error::domain("iso_power_altitudes", "transmit power never exceeds the target"));
        }
    }
    let h_high = bisect_crossing(&excess, opt, upper)?;

    Ok(IsoPowerPoint {
        r_b,
        h_low: h_low * r_b,
        h_high: h_high * r_b,
        h_opt,
        roots,
    })
}

/// Iso-power altitudes over a grid of radii, skipping infeasible ones.
pub fn iso_power_altitude_curve(
    env: &Environment,
    sol: &KernelSolution,
    power_db: f64,
    density: f64,
    params: &ServiceParams,
    radii: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<IsoPowerPoint>> {
    let power = db_to_linear(power_db);
    let mut out = Vec::with_capacity(radii.len());
    for &r_b in radii {
        match iso_power_altitudes(env, sol, power, density, params, r_b, quad) {
            Ok(p) => out.push(p),
            Err(Error::NoSolution { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Bisection for the sign change of `f` on `[lo, hi]`.
fn bisect_crossing<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_lo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Preset;
    use crate::power::total_transmit_power;

    fn solve(env: &Environment) -> KernelSolution {
        optimal_normalized_altitude(env, &BisectionConfig::default(), &QuadratureConfig::default()).unwrap()
    }

    fn grid_argmin_gamma(env: &Environment, upper: f64, steps: usize) -> (f64, f64) {
        let q = QuadratureConfig::default();
        let step = upper / steps as f64;
        (0..=steps)
            .map(|i| {
                let h = i as f64 * step;
                (h, kernel_gamma(env, h, &q).unwrap())
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    }

    #[test]
    fn urban_matches_grid_search() {
        let env = Environment::urban();
        let sol = solve(&env);
        let upper = sol.search_upper;
        let (argmin, _) = grid_argmin_gamma(&env, upper, 1000);
        assert!((sol.h_n_star - argmin).abs() <= upper * 1e-3, "{} vs {}", sol.h_n_star, argmin);
    }

    #[test]
    fn final_interval_brackets_sign_change() {
        let q = QuadratureConfig::default();
        for env in Preset::ALL.map(Environment::preset) {
            let sol = solve(&env);
            let (lo, hi) = sol.bracket;
            assert!(lo < hi);
            assert!(kernel_gamma_derivative(&env, lo, &q).unwrap() < 0.0);
            assert!(kernel_gamma_derivative(&env, hi, &q).unwrap() > 0.0);
            assert!(sol.h_n_star == lo || sol.h_n_star == hi);
        }
    }

    #[test]
    fn denser_scattering_raises_optimum() {
        let h: Vec<f64> = [Preset::Suburban, Preset::Urban, Preset::DenseUrban]
            .iter()
            .map(|&p| solve(&Environment::preset(p)).h_n_star)
            .collect();
        assert!(h.windows(2).all(|w| w[0] < w[1]), "{h:?}");
    }

    #[test]
    fn high_rise_optimum_hugs_the_ground() {
        // Weak per-degree LOS gain (b = 0.08) loses to free-space growth almost
        // immediately, so the high-rise optimum sits just above the ground.
        let sol = solve(&Environment::high_rise_urban());
        assert!(sol.h_n_star > 0.005 && sol.h_n_star < 0.008, "{sol:?}");
    }

    #[test]
    fn equal_excess_losses_put_uav_on_ground() {
        let env = Environment::new("flat", 9.61, 0.16, 5.0, 5.0, 2.4e9).unwrap();
        let sol = solve(&env);
        assert_eq!(sol.h_n_star, 0.0);
        let q = QuadratureConfig::default();
        assert_eq!(sol.gamma_at_opt, kernel_gamma(&env, 0.0, &q).unwrap());
        assert!(kernel_gamma_derivative(&env, 0.5, &q).unwrap() > 0.0);
    }

    #[test]
    fn bracket_failure_is_reported() {
        // A value that keeps falling: the derivative never turns positive.
        let cfg = BisectionConfig::default();
        let err = minimize_by_derivative_sign(|h| Ok(-1.0 / (1.0 + h)), |h| Ok(1.0 / (1.0 + h) + 1.0), "falling", &cfg)
            .unwrap_err();
        assert!(matches!(err, Error::BracketFailure { h_max, .. } if h_max == 1e20), "{err:?}");
    }

    #[test]
    fn expansion_reaches_distant_minimum() {
        // (h - 37)² + 1 needs two decades of expansion.
        let cfg = BisectionConfig::default();
        let sol = minimize_by_derivative_sign(|h| Ok(2.0 * (h - 37.0)), |h| Ok((h - 37.0).powi(2) + 1.0), "quad", &cfg).unwrap();
        assert_eq!(sol.search_upper, 100.0);
        assert!((sol.h_n_star - 37.0).abs() < 1e-3);
        let one = BisectionConfig { max_expansions: 1, ..cfg };
        assert!(minimize_by_derivative_sign(|h| Ok(2.0 * (h - 37.0)), |h| Ok((h - 37.0).powi(2) + 1.0), "quad", &one).is_err());
    }

    #[test]
    fn deterministic() {
        let env = Environment::dense_urban();
        assert_eq!(solve(&env).h_n_star.to_bits(), solve(&env).h_n_star.to_bits());
    }

    #[test]
    fn verification_sweep_accepts_bisection_result() {
        let cfg = BisectionConfig {
            verify_global: true,
            ..Default::default()
        };
        for env in Preset::ALL.map(Environment::preset) {
            optimal_normalized_altitude(&env, &cfg, &QuadratureConfig::default()).unwrap();
        }
    }

    #[test]
    fn verification_sweep_rejects_wrong_point() {
        let env = Environment::urban();
        let mut sol = solve(&env);
        sol.h_n_star *= 3.0;
        sol.gamma_at_opt = kernel_gamma(&env, sol.h_n_star, &QuadratureConfig::default()).unwrap();
        assert!(matches!(
            verify_global_minimizer(&env, &sol, &QuadratureConfig::default()),
            Err(Error::NotGlobalMinimizer { .. })
        ));
    }

    #[test]
    fn altitude_proportional_to_radius() {
        let sol = solve(&Environment::urban());
        assert_eq!(optimal_altitude_for_radius(&sol, 0.0), 0.0);
        assert_eq!(optimal_altitude_for_radius(&sol, 1.0), sol.h_n_star);
        let pts: Vec<(f64, f64)> = (1..=10)
            .map(|k| {
                let r = 100.0 * k as f64;
                (r, optimal_altitude_for_radius(&sol, r))
            })
            .collect();
        for (r, h) in pts {
            assert!((h / r - sol.h_n_star).abs() <= 1e-15 * sol.h_n_star);
        }
    }

    #[test]
    fn argmin_transfers_to_physical_altitude() {
        let env = Environment::suburban();
        let q = QuadratureConfig::default();
        let params = ServiceParams::new(1.0, 0.0, 1.0).unwrap();
        let (gamma_argmin, _) = grid_argmin_gamma(&env, 1.0, 1000);
        for r_b in [37.0, 410.0, 1900.0] {
            let step = r_b * 1e-3;
            let (h_argmin, _) = (0..=1000)
                .map(|i| {
                    let h = i as f64 * step;
                    (h, total_transmit_power(&env, r_b, 0.2, h, &params, &q).unwrap())
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!((h_argmin - r_b * gamma_argmin).abs() <= step * (1.0 + 1e-9));
        }
    }

    #[test]
    fn solution_independent_of_coverage_parameters() {
        // h_n* takes only the environment; the scale-factor inputs cannot reach it.
        let env = Environment::urban();
        let a = solve(&env);
        let b = optimal_normalized_altitude(&env.clone(), &BisectionConfig::default(), &QuadratureConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn iso_power_tangency_and_growth() {
        let env = Environment::urban();
        let q = QuadratureConfig::default();
        let sol = solve(&env);
        let params = ServiceParams::new(1.0, 0.0, 1.0).unwrap();
        let density = 0.1;
        let power = db_to_linear(80.0);
        let r_max = max_feasible_radius(&sol, power, density, &params);

        let tangent = iso_power_altitudes(&env, &sol, power, density, &params, r_max, &q).unwrap();
        assert_eq!(tangent.h_low, tangent.h_high);
        assert!((tangent.h_opt - r_max * sol.h_n_star).abs() < 1e-9 * tangent.h_opt);

        let inside = iso_power_altitudes(&env, &sol, power, density, &params, 0.5 * r_max, &q).unwrap();
        assert!(inside.h_low <= inside.h_opt && inside.h_opt <= inside.h_high);
        for h in [inside.h_low, inside.h_high] {
            if h > 0.0 {
                let p = total_transmit_power(&env, 0.5 * r_max, density, h, &params, &q).unwrap();
                assert!((p - power).abs() < 1e-6 * power);
            }
        }

        let err = iso_power_altitudes(&env, &sol, power, density, &params, 1.01 * r_max, &q).unwrap_err();
        assert!(matches!(err, Error::NoSolution { .. }));

        let r_more = max_feasible_radius(&sol, db_to_linear(80.5), density, &params);
        assert!(r_more > r_max);
    }

    #[test]
    fn iso_power_maxima_lie_on_optimal_line() {
        let env = Environment::urban();
        let q = QuadratureConfig::default();
        let sol = solve(&env);
        let params = ServiceParams::new(1.0, 0.0, 1.0).unwrap();
        for power_db in [70.0, 80.0, 90.0] {
            let power = db_to_linear(power_db);
            let r_near = max_feasible_radius(&sol, power, 0.1, &params) * (1.0 - 1e-6);
            let p = iso_power_altitudes(&env, &sol, power, 0.1, &params, r_near, &q).unwrap();
            let mid = 0.5 * (p.h_low + p.h_high);
            assert!((mid - sol.h_n_star * r_near).abs() < 0.01 * mid, "{p:?}");
        }
    }

    #[test]
    fn curve_skips_infeasible_radii() {
        let env = Environment::dense_urban();
        let q = QuadratureConfig::default();
        let sol = solve(&env);
        let params = ServiceParams::new(1.0, 0.0, 1.0).unwrap();
        let r_max = max_feasible_radius(&sol, db_to_linear(90.0), 1.0, &params);
        let radii = [0.25 * r_max, 0.5 * r_max, 0.9 * r_max, 1.5 * r_max, 3.0 * r_max];
        let curve = iso_power_altitude_curve(&env, &sol, 90.0, 1.0, &params, &radii, &q).unwrap();
        assert_eq!(curve.len(), 3);
    }
}
