//! Air-to-ground probabilistic LOS channel.
//!
//! A link between a ground user and a hovering UAV is LOS with a probability
//! that is a sigmoid in the elevation angle (measured in degrees), and either
//! branch pays free-space loss times an environment-specific excess factor.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{db_to_linear, fspl_constant, DEFAULT_CARRIER_HZ};

const RAD_TO_DEG: f64 = 180.0 / PI;

/// Propagation environment: LOS sigmoid shape and excess losses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    name: String,
    a: f64,
    b: f64,
    eta_los_db: f64,
    eta_nlos_db: f64,
    carrier_hz: f64,
}

/// The four built-in environments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Suburban,
    Urban,
    DenseUrban,
    HighRiseUrban,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Suburban,
        Preset::Urban,
        Preset::DenseUrban,
        Preset::HighRiseUrban,
    ];

    pub fn canonical_name(self) -> &'static str {
        match self {
            Preset::Suburban => "suburban",
            Preset::Urban => "urban",
            Preset::DenseUrban => "dense-urban",
            Preset::HighRiseUrban => "high-rise-urban",
        }
    }

    /// `(a, b, eta_los_db, eta_nlos_db)`.
    pub fn parameters(self) -> (f64, f64, f64, f64) {
        match self {
            Preset::Suburban => (4.88, 0.43, 0.1, 21.0),
            Preset::Urban => (9.61, 0.16, 1.0, 20.0),
            Preset::DenseUrban => (12.08, 0.11, 1.6, 23.0),
            Preset::HighRiseUrban => (27.23, 0.08, 2.3, 34.0),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical_name())
    }
}

/// Lowercases and maps `_` and spaces to `-`, so "High_Rise Urban" and
/// "high-rise-urban" name the same thing.
pub fn normalize_env_name(name: &str) -> String {
    name.trim()
        .chars()
        .map(|c| match c {
            '_' | ' ' => '-',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = normalize_env_name(s);
        Preset::ALL
            .into_iter()
            .find(|p| p.canonical_name() == key)
            .ok_or_else(|| Error::UnknownEnvironment(s.to_string()))
    }
}

impl Environment {
    /// Builds a custom environment. Excess losses are in dB.
    pub fn new(
        name: impl Into<String>,
        a: f64,
        b: f64,
        eta_los_db: f64,
        eta_nlos_db: f64,
        carrier_hz: f64,
    ) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("a", format!("must be positive, got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("b", format!("must be positive, got {b}")));
        }
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(Error::invalid(
                "carrier_hz",
                format!("must be positive, got {carrier_hz}"),
            ));
        }
        if !eta_los_db.is_finite() || !eta_nlos_db.is_finite() {
            return Err(Error::invalid("eta", "excess losses must be finite"));
        }
        if eta_nlos_db < eta_los_db {
            return Err(Error::invalid(
                "eta_nlos_db",
                format!("NLOS excess loss {eta_nlos_db} dB is below LOS excess loss {eta_los_db} dB"),
            ));
        }
        Ok(Environment {
            name: name.into(),
            a,
            b,
            eta_los_db,
            eta_nlos_db,
            carrier_hz,
        })
    }

    pub fn preset(preset: Preset) -> Self {
        let (a, b, eta_los_db, eta_nlos_db) = preset.parameters();
        Environment {
            name: preset.canonical_name().to_string(),
            a,
            b,
            eta_los_db,
            eta_nlos_db,
            carrier_hz: DEFAULT_CARRIER_HZ,
        }
    }

    pub fn suburban() -> Self {
        Self::preset(Preset::Suburban)
    }

    pub fn urban() -> Self {
        Self::preset(Preset::Urban)
    }

    pub fn dense_urban() -> Self {
        Self::preset(Preset::DenseUrban)
    }

    pub fn high_rise_urban() -> Self {
        Self::preset(Preset::HighRiseUrban)
    }

    /// Looks up a preset by name (case, `-`, `_` and space insensitive).
    pub fn by_name(name: &str) -> Result<Self> {
        name.parse::<Preset>().map(Self::preset)
    }

    pub fn with_carrier(mut self, carrier_hz: f64) -> Result<Self> {
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(Error::invalid(
                "carrier_hz",
                format!("must be positive, got {carrier_hz}"),
            ));
        }
        self.carrier_hz = carrier_hz;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eta_los_db(&self) -> f64 {
        self.eta_los_db
    }

    pub fn eta_nlos_db(&self) -> f64 {
        self.eta_nlos_db
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn eta_los(&self) -> f64 {
        db_to_linear(self.eta_los_db)
    }

    pub fn eta_nlos(&self) -> f64 {
        db_to_linear(self.eta_nlos_db)
    }

    /// `(4π f_c / c)²`.
    pub fn fspl_constant(&self) -> f64 {
        fspl_constant(self.carrier_hz)
    }

    /// Key that identifies the environment by value, for memoization.
    pub(crate) fn cache_key(&self) -> (String, [u64; 5]) {
        (
            self.name.clone(),
            [
                self.a.to_bits(),
                self.b.to_bits(),
                self.eta_los_db.to_bits(),
                self.eta_nlos_db.to_bits(),
                self.carrier_hz.to_bits(),
            ],
        )
    }

    pub(crate) fn coeffs(&self) -> Coeffs {
        Coeffs {
            a: self.a,
            b: self.b,
            eta_los: self.eta_los(),
            eta_nlos: self.eta_nlos(),
            fspl: self.fspl_constant(),
        }
    }
}

/// User-to-UAV geometry: ground distance and hovering altitude, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub r_u: f64,
    pub h: f64,
}

impl LinkGeometry {
    pub fn new(r_u: f64, h: f64) -> Self {
        LinkGeometry { r_u, h }
    }

    /// Squared slant distance `r_u² + h²`.
    pub fn distance_sq(&self) -> f64 {
        self.r_u * self.r_u + self.h * self.h
    }

    pub fn distance(&self) -> f64 {
        self.r_u.hypot(self.h)
    }

    /// Elevation angle in degrees; 90° directly below the UAV.
    pub fn elevation_deg(&self) -> f64 {
        if self.r_u == 0.0 {
            90.0
        } else {
            RAD_TO_DEG * (self.h / self.r_u).atan()
        }
    }

    fn check(&self, op: &'static str) -> Result<()> {
        if !(self.r_u >= 0.0 && self.h >= 0.0) || !self.r_u.is_finite() || !self.h.is_finite() {
            return Err(Error::domain(
                op,
                format!("geometry must be finite and non-negative (r_u = {}, h = {})", self.r_u, self.h),
            ));
        }
        if self.r_u == 0.0 && self.h == 0.0 {
            return Err(Error::domain(
                op,
                "user and UAV coincide; elevation angle and distance are undefined",
            ));
        }
        Ok(())
    }
}

/// Link state of a single realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkState {
    Los,
    Nlos,
}

/// Linear-domain channel constants for inner loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Coeffs {
    pub a: f64,
    pub b: f64,
    pub eta_los: f64,
    pub eta_nlos: f64,
    pub fspl: f64,
}

impl Coeffs {
    /// NLOS-to-LOS odds `q = a·exp(−b(θ − a))`, so that `P₀ = 1 / (1 + q)`.
    #[inline]
    pub fn nlos_odds_deg(&self, theta_deg: f64) -> f64 {
        self.a * (-self.b * (theta_deg - self.a)).exp()
    }

    #[inline]
    pub fn nlos_odds(&self, r_u: f64, h: f64) -> f64 {
        let theta = if r_u == 0.0 {
            90.0
        } else {
            RAD_TO_DEG * (h / r_u).atan()
        };
        self.nlos_odds_deg(theta)
    }

    #[inline]
    pub fn los_probability_deg(&self, theta_deg: f64) -> f64 {
        1.0 / (1.0 + self.nlos_odds_deg(theta_deg))
    }

    #[inline]
    pub fn los_probability(&self, r_u: f64, h: f64) -> f64 {
        1.0 / (1.0 + self.nlos_odds(r_u, h))
    }

    /// Mean excess-loss factor `η₁ + P₀(η₀ − η₁)`, written in terms of the
    /// odds so it stays accurate when `P₀ → 1` and `η₁ ≫ η₀`.
    #[inline]
    pub fn mean_excess_from_odds(&self, q: f64) -> f64 {
        if q.is_infinite() {
            return self.eta_nlos;
        }
        (self.eta_los + self.eta_nlos * q) / (1.0 + q)
    }

    #[inline]
    pub fn average_path_loss(&self, r_u: f64, h: f64) -> f64 {
        let q = self.nlos_odds(r_u, h);
        self.fspl * (r_u * r_u + h * h) * self.mean_excess_from_odds(q)
    }
}

/// `P₀(1 − P₀)` from the odds, finite for any `q`.
#[inline]
pub(crate) fn los_nlos_product(q: f64) -> f64 {
    if q.is_infinite() {
        return 0.0;
    }
    let s = 1.0 + q;
    q / (s * s)
}

/// Probability that the link is line-of-sight.
pub fn los_probability(env: &Environment, geom: LinkGeometry) -> Result<f64> {
    geom.check("los_probability")?;
    Ok(env.coeffs().los_probability_deg(geom.elevation_deg()))
}

/// `∂P₀/∂h` in 1/m, with the elevation angle taken in degrees.
pub fn los_probability_altitude_derivative(env: &Environment, geom: LinkGeometry) -> Result<f64> {
    geom.check("los_probability_altitude_derivative")?;
    let q = env.coeffs().nlos_odds_deg(geom.elevation_deg());
    Ok(RAD_TO_DEG * env.b * geom.r_u * los_nlos_product(q) / geom.distance_sq())
}

/// Path loss of one link branch, as a linear power ratio.
pub fn path_loss(env: &Environment, geom: LinkGeometry, state: LinkState) -> Result<f64> {
    geom.check("path_loss")?;
    let eta = match state {
        LinkState::Los => env.eta_los(),
        LinkState::Nlos => env.eta_nlos(),
    };
    Ok(env.fspl_constant() * geom.distance_sq() * eta)
}

/// LOS-probability-weighted path loss, as a linear power ratio.
pub fn average_path_loss(env: &Environment, geom: LinkGeometry) -> Result<f64> {
    geom.check("average_path_loss")?;
    let c = env.coeffs();
    let q = c.nlos_odds_deg(geom.elevation_deg());
    Ok(c.fspl * geom.distance_sq() * c.mean_excess_from_odds(q))
}
