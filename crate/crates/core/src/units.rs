//! Unit conversions used at the I/O boundary.
//!
//! Inside the planner every power is a linear ratio to the noise power and
//! every excess loss is a linear factor; decibels only appear in inputs and
//! reports.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Carrier frequency used when none is given, Hz.
pub const DEFAULT_CARRIER_HZ: f64 = 2.4e9;

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// `(4π f_c / c)²`, the distance-independent free-space path-loss factor.
#[inline]
pub fn fspl_constant(carrier_hz: f64) -> f64 {
    let k = 4.0 * std::f64::consts::PI * carrier_hz / SPEED_OF_LIGHT;
    k * k
}

/// `2^rate - 1`, the SNR needed per unit of path loss to carry `rate` bit/s/Hz.
#[inline]
pub fn rate_factor(rate_su: f64) -> f64 {
    rate_su.exp2() - 1.0
}
