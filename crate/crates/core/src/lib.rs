//! Rate analysis of a HAP relay between a Poisson field of ground users and a
//! random LEO constellation.
//!
//! The analytic pipeline ([`analytic::analytic_metrics`]) gives the average
//! access data rate, the average backhaul data rate and the probability that
//! the backhaul outpaces the access sum rate. [`montecarlo`] estimates the
//! same quantities by simulation, and [`planner`] inverts them for the
//! minimum HAP transmit power.
//!
//! ```
//! use sagin_relay::analytic::analytic_metrics;
//! use sagin_relay::NetworkConfig;
//!
//! let m = analytic_metrics(&NetworkConfig::default().with_user_density(1e-8)).unwrap();
//! assert!(m.aadr > m.abdr);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.

pub mod analytic;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod planner;
pub mod quadrature;
pub mod special;
pub mod stochastic;

pub use error::{Error, Result};
pub use model::{load_config, DerivedGeometry, NetworkConfig};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/access.md")]
    mod access {}
    #[doc = include_str!("../../../book/src/backhaul.md")]
    mod backhaul {}
    #[doc = include_str!("../../../book/src/montecarlo.md")]
    mod montecarlo {}
    #[doc = include_str!("../../../book/src/planning.md")]
    mod planning {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
