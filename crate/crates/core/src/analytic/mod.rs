//! Closed-form metrics: the Laplace transform of the aggregate user power,
//! the CCDF of the normalized user signal, the marginal FSO fade and the
//! AADR, ABDR and BREP built on them.

mod access;
mod backhaul;

pub use access::{aadr, ccdf_z, laplace_interference, mgf_z, AccessAnalysis, ZContext};
pub use backhaul::{
    abdr, abdr_integral, brep, brep_ceiling, ds_moment, fso_continuous_mass, fso_fade_cdf, fso_fade_pdf,
    fso_snr_gain, BrepFactors, BREP_SERIES_MAX_TERMS, BREP_SERIES_REL_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::NetworkConfig;
use crate::stochastic::blockage_probability;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Outer quadrature error estimate of the AADR, bit/s.
    pub aadr_error: f64,
    /// Outer quadrature error estimate of the ABDR, bit/s.
    pub abdr_error: f64,
    pub cap_nodes: usize,
    pub z_nodes: usize,
    /// CCDF values outside `[0, 1]` that were clamped.
    pub clamped_ccdf_values: usize,
    pub series_terms: usize,
    pub series_truncation_bound: f64,
    /// Closed-form BREP before clamping to `[0, ceiling]`.
    pub brep_unclamped: f64,
    pub brep_ceiling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticMetrics {
    /// bit/s
    pub aadr: f64,
    /// bit/s
    pub abdr: f64,
    pub brep: f64,
    pub blockage_prob: f64,
    pub diagnostics: Diagnostics,
    pub config_hash: String,
}

/// Evaluates all three metrics, sharing the access-side profiles between the
/// AADR and the BREP.
pub fn analytic_metrics(cfg: &NetworkConfig) -> Result<AnalyticMetrics> {
    cfg.validate()?;
    let access = AccessAnalysis::new(cfg)?;
    let factors = BrepFactors::new(cfg, &access)?;
    let backhaul = abdr_integral(cfg)?;
    let raw = factors.raw_brep_at(cfg.hap_tx_power);
    Ok(AnalyticMetrics {
        aadr: access.aadr(cfg.rf_bandwidth),
        abdr: backhaul.value,
        brep: factors.brep_at(cfg.hap_tx_power),
        blockage_prob: blockage_probability(cfg),
        diagnostics: Diagnostics {
            aadr_error: access.outer_error(cfg.rf_bandwidth),
            abdr_error: backhaul.abs_error,
            cap_nodes: access.cap_nodes(),
            z_nodes: access.z_nodes(),
            clamped_ccdf_values: access.clamped_ccdf_values(),
            series_terms: factors.series.terms_used,
            series_truncation_bound: factors.series.truncation_bound,
            brep_unclamped: raw,
            brep_ceiling: factors.ceiling,
        },
        config_hash: cfg.config_hash(),
    })
}
