//! Scenario files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "carrier_hz": 2.4e9,
//!   "environments": { "campus": { "a": 6.0, "b": 0.3, "eta_los_db": 0.5, "eta_nlos_db": 18.0 } },
//!   "subregions": [
//!     { "label": "core", "area_m2": 1.0e6, "density_per_m2": 0.1, "environment": "urban",
//!       "geometry": { "x": 0, "y": 0, "width": 1000, "height": 1000 } }
//!   ],
//!   "service": { "rate_su": 1.0, "circuit_power_db": 100.0, "battery_j": 1.0 },
//!   "solver": { "epsilon": 1e-3, "rel_tol": 1e-9, "trials": 10000, "seed": 42 }
//! }
//! ```
//!
//! Presets are always available by name. A subregion gives either `area_m2`
//! or `area_over_pi_eb`; `battery_j` may be omitted only when every
//! subregion uses the latter, in which case it defaults to 1 J.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Deserialize;
use uavplan_core::channel::normalize_env_name;
use uavplan_core::units::DEFAULT_CARRIER_HZ;
use uavplan_core::{BisectionConfig, Environment, Preset, QuadratureConfig, Rect, ServiceParams, SimConfig, Subregion};

use crate::error::{CliError, CliResult};

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    version: u32,
    carrier_hz: Option<f64>,
    #[serde(default)]
    environments: BTreeMap<String, EnvSpec>,
    subregions: Vec<SubregionSpec>,
    service: ServiceSpec,
    solver: Option<SolverSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvSpec {
    a: f64,
    b: f64,
    eta_los_db: f64,
    eta_nlos_db: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubregionSpec {
    label: String,
    area_m2: Option<f64>,
    area_over_pi_eb: Option<f64>,
    density_per_m2: f64,
    environment: String,
    geometry: Option<Rect>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ServiceSpec {
    rate_su: f64,
    circuit_power_db: f64,
    battery_j: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSpec {
    epsilon: Option<f64>,
    rel_tol: Option<f64>,
    trials: Option<u64>,
    seed: Option<u64>,
}

/// A validated scenario with every name resolved.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub carrier_hz: f64,
    pub subregions: Vec<Subregion>,
    /// Rectangle of each subregion, parallel to `subregions`.
    pub geometry: Vec<Option<Rect>>,
    pub circuit_power_db: f64,
    pub params: ServiceParams,
    pub bisect: BisectionConfig,
    pub quad: QuadratureConfig,
    pub sim: SimConfig,
    custom_envs: HashMap<String, Environment>,
}

fn bad(field: impl AsRef<str>, detail: impl AsRef<str>) -> CliError {
    CliError::input(format!("{}: {}", field.as_ref(), detail.as_ref()))
}

fn core_detail(e: uavplan_core::Error) -> String {
    e.to_string()
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| CliError::input(format!("scenario schema error: {e}")))?;
        if file.version != SCENARIO_VERSION {
            return Err(bad("version", format!("unsupported value {}, expected {SCENARIO_VERSION}", file.version)));
        }
        let carrier_hz = file.carrier_hz.unwrap_or(DEFAULT_CARRIER_HZ);
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(bad("carrier_hz", format!("must be positive, got {carrier_hz}")));
        }

        let mut custom_envs = HashMap::new();
        for (name, spec) in &file.environments {
            let field = format!("environments.{name}");
            let key = normalize_env_name(name);
            if key.is_empty() {
                return Err(bad(field, "name must not be empty"));
            }
            if key.parse::<Preset>().is_ok() {
                return Err(bad(field, "name collides with a built-in environment"));
            }
            if custom_envs.contains_key(&key) {
                return Err(bad(field, "duplicate environment name"));
            }
            let env = Environment::new(name.clone(), spec.a, spec.b, spec.eta_los_db, spec.eta_nlos_db, carrier_hz)
                .map_err(|e| bad(&field, core_detail(e)))?;
            custom_envs.insert(key, env);
        }

        let svc = &file.service;
        let uses_area = file.subregions.iter().any(|s| s.area_m2.is_some());
        let battery_j = match svc.battery_j {
            Some(b) => b,
            None if uses_area => return Err(bad("service.battery_j", "required when a subregion gives area_m2")),
            None => 1.0,
        };
        if !svc.circuit_power_db.is_finite() {
            return Err(bad("service.circuit_power_db", "must be finite"));
        }
        let params = ServiceParams::with_circuit_power_db(svc.rate_su, svc.circuit_power_db, battery_j)
            .map_err(|e| bad("service", core_detail(e)))?;

        let mut bisect = BisectionConfig::default();
        let mut quad = QuadratureConfig::default();
        let mut sim = SimConfig::default();
        if let Some(s) = &file.solver {
            if let Some(eps) = s.epsilon {
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(bad("solver.epsilon", format!("must be positive, got {eps}")));
                }
                bisect.epsilon = eps;
            }
            if let Some(tol) = s.rel_tol {
                if !(tol > 0.0 && tol.is_finite()) {
                    return Err(bad("solver.rel_tol", format!("must be positive, got {tol}")));
                }
                quad.rel_tol = tol;
            }
            if let Some(t) = s.trials {
                if t < 1 {
                    return Err(bad("solver.trials", "must be at least 1"));
                }
                sim.trials = t;
            }
            if let Some(seed) = s.seed {
                sim.seed = seed;
            }
        }

        if file.subregions.is_empty() {
            return Err(bad("subregions", "at least one subregion is required"));
        }
        let mut subregions = Vec::with_capacity(file.subregions.len());
        let mut geometry = Vec::with_capacity(file.subregions.len());
        let mut labels = std::collections::HashSet::new();
        let mut scenario = Scenario {
            carrier_hz,
            subregions: Vec::new(),
            geometry: Vec::new(),
            circuit_power_db: svc.circuit_power_db,
            params,
            bisect,
            quad,
            sim,
            custom_envs,
        };
        for (i, s) in file.subregions.iter().enumerate() {
            let field = |name: &str| format!("subregions[{i}].{name}");
            if s.label.is_empty() {
                return Err(bad(field("label"), "must not be empty"));
            }
            if !labels.insert(s.label.clone()) {
                return Err(bad(field("label"), format!("duplicate label '{}'", s.label)));
            }
            let env = scenario
                .environment(&s.environment)
                .map_err(|_| bad(field("environment"), format!("unknown environment '{}'", s.environment)))?;
            if !(s.density_per_m2 >= 0.0 && s.density_per_m2.is_finite()) {
                return Err(bad(field("density_per_m2"), format!("must be non-negative, got {}", s.density_per_m2)));
            }
            let area = match (s.area_m2, s.area_over_pi_eb) {
                (Some(a), None) => a,
                (None, Some(ratio)) => ratio * std::f64::consts::PI * battery_j,
                _ => return Err(bad(field("area_m2"), "exactly one of area_m2 or area_over_pi_eb is required")),
            };
            if !(area > 0.0 && area.is_finite()) {
                let name = if s.area_m2.is_some() { "area_m2" } else { "area_over_pi_eb" };
                return Err(bad(field(name), "must be positive"));
            }
            if let Some(g) = &s.geometry {
                let ok = [g.x, g.y, g.width, g.height].iter().all(|v| v.is_finite()) && g.width >= 0.0 && g.height >= 0.0;
                if !ok {
                    return Err(bad(field("geometry"), "needs finite x, y and non-negative width, height"));
                }
            }
            subregions.push(Subregion::new(s.label.clone(), area, s.density_per_m2, env).map_err(|e| bad(field("label"), core_detail(e)))?);
            geometry.push(s.geometry);
        }
        scenario.subregions = subregions;
        scenario.geometry = geometry;
        Ok(scenario)
    }

    /// Resolves a custom environment or preset by name, at the scenario's
    /// carrier frequency.
    pub fn environment(&self, name: &str) -> CliResult<Environment> {
        let key = normalize_env_name(name);
        if let Some(env) = self.custom_envs.get(&key) {
            return Ok(env.clone());
        }
        resolve_preset(name, self.carrier_hz)
    }
}

/// A preset at the given carrier frequency.
pub fn resolve_preset(name: &str, carrier_hz: f64) -> CliResult<Environment> {
    let env = Environment::by_name(name).map_err(|_| bad("env", format!("unknown environment '{name}'")))?;
    env.with_carrier(carrier_hz).map_err(CliError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "version": 1,
        "subregions": [
            {"label": "a", "area_over_pi_eb": 1.0, "density_per_m2": 0.1, "environment": "urban"}
        ],
        "service": {"rate_su": 1.0, "circuit_power_db": 100.0}
    }"#;

    fn with(patch: impl Fn(&mut serde_json::Value)) -> String {
        let mut v: serde_json::Value = serde_json::from_str(BASE).unwrap();
        patch(&mut v);
        v.to_string()
    }

    fn err(text: &str) -> String {
        match Scenario::parse(text) {
            Err(CliError::Input(m)) => m,
            other => panic!("expected input error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_scenario() {
        let s = Scenario::parse(BASE).unwrap();
        assert_eq!(s.params.battery_j, 1.0);
        assert!((s.subregions[0].area_m2 - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(s.sim.seed, 42);
        assert_eq!(s.carrier_hz, DEFAULT_CARRIER_HZ);
    }

    #[test]
    fn field_named_errors() {
        assert!(err(&with(|v| v["version"] = 2.into())).contains("version"));
        assert!(err(&with(|v| v["subregions"] = serde_json::json!([]))).contains("subregions"));
        assert!(err(&with(|v| v["bogus"] = 1.into())).contains("bogus"));
        assert!(err(&with(|v| v["subregions"][0]["density_per_m2"] = (-1.0).into())).contains("subregions[0].density_per_m2"));
        assert!(err(&with(|v| v["subregions"][0]["environment"] = "moon".into())).contains("subregions[0].environment"));
        assert!(err(&with(|v| v["subregions"][0]["area_m2"] = 5.0.into())).contains("area_m2"));
        assert!(err(&with(|v| {
            v["subregions"][0].as_object_mut().unwrap().remove("area_over_pi_eb");
            v["subregions"][0]["area_m2"] = 5.0.into();
        }))
        .contains("service.battery_j"));
        assert!(err(&with(|v| v["solver"] = serde_json::json!({"trials": 0}))).contains("solver.trials"));
        assert!(err(&with(|v| v["service"]["rate_su"] = (-1.0).into())).contains("rate_su"));
        assert!(err(&with(|v| {
            v["service"].as_object_mut().unwrap().remove("rate_su");
        }))
        .contains("rate_su"));
    }

    #[test]
    fn custom_environments() {
        let text = with(|v| {
            v["environments"] = serde_json::json!({"Campus": {"a": 6.0, "b": 0.3, "eta_los_db": 0.5, "eta_nlos_db": 18.0}});
            v["subregions"][0]["environment"] = "campus".into();
        });
        let s = Scenario::parse(&text).unwrap();
        assert_eq!(s.subregions[0].env.a(), 6.0);

        let clash = with(|v| {
            v["environments"] = serde_json::json!({"Dense_Urban": {"a": 6.0, "b": 0.3, "eta_los_db": 0.5, "eta_nlos_db": 18.0}});
        });
        assert!(err(&clash).contains("environments.Dense_Urban"));

        let invalid = with(|v| {
            v["environments"] = serde_json::json!({"x": {"a": -6.0, "b": 0.3, "eta_los_db": 0.5, "eta_nlos_db": 18.0}});
        });
        assert!(err(&invalid).contains("environments.x"));
    }

    #[test]
    fn carrier_applies_to_presets() {
        let s = Scenario::parse(&with(|v| v["carrier_hz"] = 5.8e9.into())).unwrap();
        assert_eq!(s.subregions[0].env.carrier_hz(), 5.8e9);
    }
}
