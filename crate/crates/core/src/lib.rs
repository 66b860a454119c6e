//! Energy-optimal 3D placement of UAV-mounted base stations.
//!
//! The planner picks a coverage radius and hovering altitude per subregion
//! that minimize how often UAVs must be recalled to swap batteries. The
//! optimal altitude is a fixed multiple of the radius that depends only on
//! the propagation environment ([`altitude`]), and the optimal radius has a
//! closed form in the circuit power and user density ([`placement`]). The
//! [`montecarlo`] module is an independent stochastic check of both.

pub mod altitude;
pub mod channel;
pub mod error;
pub mod layout;
pub mod montecarlo;
pub mod placement;
pub mod power;
pub mod quadrature;
pub mod units;

pub use altitude::{optimal_altitude_for_radius, optimal_normalized_altitude, BisectionConfig};
pub use channel::{Environment, LinkGeometry, LinkState, Preset};
pub use error::{Error, Result};
pub use layout::{hex_lattice, Rect};
pub use montecarlo::{SimConfig, SimResult};
pub use placement::{plan_area, PlacementPlan, Subregion, SubregionPlan};
pub use power::{KernelSolution, ServiceParams};
pub use quadrature::QuadratureConfig;
