//! Hexagonal placement of coverage disks inside a rectangle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.x, self.y, self.width, self.height].iter().all(|v| v.is_finite());
        if !finite || self.width < 0.0 || self.height < 0.0 {
            return Err(Error::invalid("geometry", "rectangle needs finite coordinates and non-negative size"));
        }
        Ok(())
    }
}

/// Lattice count over the fractional count `A/(π r²)` for a large area:
/// a hexagonal lattice of pitch `2r` has one center per `2√3·r²`.
pub const HEX_TO_DISK_COUNT_RATIO: f64 = std::f64::consts::PI / (2.0 * 1.732_050_807_568_877_2);

/// Centers of a hexagonal lattice with pitch `2·r_b`, rows offset by half a
/// pitch, restricted to those inside `rect`. Empty for a zero-area rectangle
/// or a zero radius.
pub fn hex_lattice(rect: &Rect, r_b: f64) -> Result<Vec<(f64, f64)>> {
    rect.validate()?;
    if !(r_b >= 0.0 && r_b.is_finite()) {
        return Err(Error::domain("hex_lattice", format!("radius must be non-negative, got {r_b}")));
    }
    if r_b == 0.0 || rect.area() == 0.0 {
        return Ok(Vec::new());
    }
    let pitch = 2.0 * r_b;
    let row_step = pitch * 3f64.sqrt() / 2.0;
    let (x_end, y_end) = (rect.x + rect.width, rect.y + rect.height);
    let mut centers = Vec::new();
    let mut row = 0u64;
    loop {
        let cy = rect.y + (row as f64 + 0.5) * row_step;
        if cy > y_end {
            break;
        }
        let shift = if row % 2 == 1 { 0.5 } else { 0.0 };
        let mut col = 0u64;
        loop {
            let cx = rect.x + (col as f64 + 0.5 + shift) * pitch;
            if cx > x_end {
                break;
            }
            centers.push((cx, cy));
            col += 1;
        }
        row += 1;
    }
    Ok(centers)
}
