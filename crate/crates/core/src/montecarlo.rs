//! Poisson-point-process simulation of a coverage disk.
//!
//! Users are dropped by a PPP, each link draws LOS or NLOS from the
//! elevation-angle model, and the per-user transmit power is summed. The
//! empirical mean is an unbiased estimate of the analytic transmit power, so
//! this module checks the quadrature and the closed-form placement from
//! outside.
//!
//! Trial `i` draws from the ChaCha8 stream `i` of the configured seed, so
//! results do not depend on how trials are scheduled across threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Coeffs, Environment, LinkGeometry};
use crate::error::{Error, Result};
use crate::placement::{recall_frequency, uav_count, Subregion};
use crate::power::{kernel_gamma, total_transmit_power, KernelSolution, ServiceParams};
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Minimum number of trials handed to one worker.
    pub batch: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: 10_000,
            seed: 42,
            batch: 64,
        }
    }
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        SimConfig { trials, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.batch < 1 {
            return Err(Error::invalid("batch", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub mean_pt: f64,
    pub stderr_pt: f64,
    pub mean_users: f64,
    pub stderr_users: f64,
    /// Set by [`empirical_recall_frequency`].
    pub empirical_phi: Option<f64>,
    pub stderr_phi: Option<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl SimResult {
    /// `(mean_pt − reference) / stderr_pt`. Infinite when the standard error
    /// is zero and the means differ.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean_pt - reference;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr_pt
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Trial {
    power: f64,
    users: f64,
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn run_trial(c: &Coeffs, poisson: Option<&Poisson<f64>>, r_b: f64, h: f64, rate_factor: f64, rng: &mut ChaCha8Rng) -> Trial {
    let Some(poisson) = poisson else {
        return Trial::default();
    };
    let count = poisson.sample(rng) as u64;
    let mut power = 0.0;
    for _ in 0..count {
        // 1 − U lies in (0, 1], so a user never sits exactly under a UAV at
        // ground level. The angle is irrelevant to the loss and not drawn.
        let r = r_b * (1.0 - rng.random::<f64>()).sqrt();
        let eta = if rng.random::<f64>() < c.los_probability(r, h) {
            c.eta_los
        } else {
            c.eta_nlos
        };
        power += c.fspl * (r * r + h * h) * eta;
    }
    Trial {
        power: power * rate_factor,
        users: count as f64,
    }
}

/// Mean and standard error of the mean, summed in index order.
fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (nf - 1.0) / nf).sqrt())
}

/// Simulates the transmit power of one UAV covering a disk of radius `r_b`
/// at altitude `h`.
pub fn sample_transmit_power(
    env: &Environment,
    r_b: f64,
    density: f64,
    h: f64,
    params: &ServiceParams,
    sim: &SimConfig,
) -> Result<SimResult> {
    sim.validate()?;
    if !(r_b > 0.0 && r_b.is_finite()) {
        return Err(Error::domain("sample_transmit_power", format!("coverage radius must be positive, got {r_b}")));
    }
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::domain("sample_transmit_power", format!("altitude must be non-negative, got {h}")));
    }
    if !(density >= 0.0 && density.is_finite()) {
        return Err(Error::domain("sample_transmit_power", format!("density must be non-negative, got {density}")));
    }
    let mean_count = density * PI * r_b * r_b;
    let poisson = if mean_count > 0.0 {
        Some(Poisson::new(mean_count).map_err(|e| Error::domain("sample_transmit_power", e.to_string()))?)
    } else {
        None
    };
    let c = env.coeffs();
    let rf = params.rate_factor();
    let trials: Vec<Trial> = (0..sim.trials as usize)
        .into_par_iter()
        .with_min_len(sim.batch)
        .map(|i| run_trial(&c, poisson.as_ref(), r_b, h, rf, &mut trial_rng(sim.seed, i as u64)))
        .collect();
    let n = trials.len();
    let (mean_pt, stderr_pt) = mean_and_stderr(trials.iter().map(|t| t.power), n);
    let (mean_users, stderr_users) = mean_and_stderr(trials.iter().map(|t| t.users), n);
    Ok(SimResult {
        mean_pt,
        stderr_pt,
        mean_users,
        stderr_users,
        empirical_phi: None,
        stderr_phi: None,
        trials: sim.trials,
        seed: sim.seed,
    })
}

/// Empirical recall frequency `N·(P̂_t + P_c)/E_b` at radius `r_b`, with the
/// UAV at the optimal altitude for that radius.
pub fn empirical_recall_frequency(
    sub: &Subregion,
    r_b: f64,
    params: &ServiceParams,
    sol: &KernelSolution,
    sim: &SimConfig,
) -> Result<SimResult> {
    let h = r_b * sol.h_n_star;
    let mut res = sample_transmit_power(&sub.env, r_b, sub.density, h, params, sim)?;
    let n = uav_count(sub.area_m2, r_b)?;
    res.empirical_phi = Some(n * (res.mean_pt + params.circuit_power) / params.battery_j);
    res.stderr_phi = Some(n * res.stderr_pt / params.battery_j);
    Ok(res)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LosSample {
    pub fraction: f64,
    /// Binomial standard error at the analytic probability.
    pub stderr: f64,
    pub analytic: f64,
    pub draws: u64,
}

/// Draws `draws` independent LOS indicators at a fixed geometry.
pub fn sample_los_fraction(env: &Environment, geom: LinkGeometry, draws: u64, seed: u64) -> Result<LosSample> {
    if draws < 1 {
        return Err(Error::invalid("draws", "must be at least 1"));
    }
    let p = crate::channel::los_probability(env, geom)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..draws).filter(|_| rng.random::<f64>() < p).count() as f64;
    let n = draws as f64;
    Ok(LosSample {
        fraction: hits / n,
        stderr: (p * (1.0 - p) / n).sqrt(),
        analytic: p,
        draws,
    })
}

/// Evaluation points of an exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Geometric spacing instead of linear.
    pub geometric: bool,
}

impl GridSpec {
    pub fn linear(lo: f64, hi: f64, points: usize) -> Self {
        GridSpec { lo, hi, points, geometric: false }
    }

    pub fn geometric(lo: f64, hi: f64, points: usize) -> Self {
        GridSpec { lo, hi, points, geometric: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::invalid("points", "grid needs at least 2 points"));
        }
        let lo_ok = if self.geometric { self.lo > 0.0 } else { self.lo >= 0.0 };
        if !(lo_ok && self.hi > self.lo && self.hi.is_finite()) {
            return Err(Error::invalid("grid", format!("bad bounds [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn point(&self, i: usize) -> f64 {
        let last = self.points - 1;
        if i == last {
            return self.hi;
        }
        let t = i as f64 / last as f64;
        if self.geometric {
            self.lo * (self.hi / self.lo).powf(t)
        } else {
            self.lo + t * (self.hi - self.lo)
        }
    }
}

/// Objective minimized by [`grid_search_oracle`].
pub enum Objective<'a> {
    /// Kernel `Γ(h_n)` of an environment.
    Gamma { env: &'a Environment, quad: &'a QuadratureConfig },
    /// Recall frequency over the radius with the altitude on the optimal
    /// line; transmit power by direct quadrature rather than the kernel.
    Phi {
        sub: &'a Subregion,
        params: &'a ServiceParams,
        sol: &'a KernelSolution,
        quad: &'a QuadratureConfig,
    },
    /// Recall frequency in the kernel form, at the solved `Γ*`.
    PhiClosedForm {
        sub: &'a Subregion,
        params: &'a ServiceParams,
        sol: &'a KernelSolution,
    },
    Custom(&'a (dyn Fn(f64) -> Result<f64> + Sync)),
}

impl Objective<'_> {
    fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Objective::Gamma { env, quad } => kernel_gamma(env, x, quad),
            Objective::Phi { sub, params, sol, quad } => {
                let p_t = total_transmit_power(&sub.env, x, sub.density, x * sol.h_n_star, params, quad)?;
                Ok(uav_count(sub.area_m2, x)? * (p_t + params.circuit_power) / params.battery_j)
            }
            Objective::PhiClosedForm { sub, params, sol } => recall_frequency(sub, x, params, sol),
            Objective::Custom(f) => f(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMinimum {
    pub argmin: f64,
    pub min_value: f64,
    pub index: usize,
    /// Neighboring grid points (the argmin itself at an end of the grid).
    pub below: f64,
    pub above: f64,
}

impl GridMinimum {
    /// True when `x` lies within one grid step of the argmin.
    pub fn brackets(&self, x: f64) -> bool {
        self.below <= x && x <= self.above
    }
}

/// Evaluates `objective` at every grid point and returns the smallest value.
/// Ties resolve to the lowest index.
pub fn grid_search_oracle(objective: &Objective<'_>, grid: &GridSpec) -> Result<GridMinimum> {
    grid.validate()?;
    let values = (0..grid.points)
        .into_par_iter()
        .map(|i| objective.eval(grid.point(i)))
        .collect::<Result<Vec<f64>>>()?;
    let mut index = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[index] {
            index = i;
        }
    }
    Ok(GridMinimum {
        argmin: grid.point(index),
        min_value: values[index],
        index,
        below: grid.point(index.saturating_sub(1)),
        above: grid.point((index + 1).min(grid.points - 1)),
    })
}
