//! Network parameters, unit conversions and the spherical geometry derived
//! from them.

mod config;
mod geometry;
pub mod units;

pub use config::{load_config, load_config_file, NetworkConfig};
pub(crate) use geometry::one_minus_cos;
pub use geometry::{derive_geometry, theta_max_from_d_max, DerivedGeometry};
