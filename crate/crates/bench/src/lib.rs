//! Benchmark fixtures.

use uavplan_core::{Environment, ServiceParams};

/// Urban operating point: density 0.1 /m², 1 bit/s/Hz, 100 dB circuit power.
pub fn urban_operating_point() -> (Environment, f64, ServiceParams) {
    let params = ServiceParams::with_circuit_power_db(1.0, 100.0, 1.0).expect("valid service parameters");
    (Environment::urban(), 0.1, params)
}
