//! Minimum HAP transmit power for a backhaul target, parameter sweeps and
//! analytic-versus-simulation validation.

mod sweep;
mod validate;

pub use sweep::{sweep, CellValue, MetricKind, SweepAxis, SweepAxisName, SweepGrid, SweepQuantity};
pub use validate::{compare, validate, ValidationReport, ValidationRow, MIN_VALIDATION_ROUNDS};

use serde::{Deserialize, Serialize};

use crate::analytic::{abdr, AccessAnalysis, BrepFactors};
use crate::error::{Error, Result};
use crate::model::units::{dbw_to_watts, watts_to_dbw};
use crate::model::NetworkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    /// `ABDR ≥ ratio · AADR`.
    AbdrRatio,
    /// `BREP ≥ target`.
    Brep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerOptions {
    pub low_dbw: f64,
    pub high_dbw: f64,
    /// The upper end of the bracket is raised in 10 dB steps up to here.
    pub cap_dbw: f64,
    /// Relative width of the final bracket in watts.
    pub rel_tol: f64,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            low_dbw: -20.0,
            high_dbw: 60.0,
            cap_dbw: 120.0,
            rel_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerPlanResult {
    pub target_kind: TargetKind,
    pub target_value: f64,
    pub min_power_w: f64,
    pub min_power_dbw: f64,
    pub iterations: usize,
    /// Final bracket `(low, high)` in watts; the metric misses the target at
    /// `low` and meets it at `high`.
    pub bracket: (f64, f64),
    /// Metric value at `min_power_w`.
    pub achieved_metric: f64,
}

/// Smallest power in the bracket with `metric(power) ≥ target`, assuming
/// `metric` is nondecreasing.
fn bisect(
    mut metric: impl FnMut(f64) -> Result<f64>,
    target: f64,
    opts: &PlannerOptions,
) -> Result<(f64, (f64, f64), usize, f64)> {
    let mut lo = dbw_to_watts(opts.low_dbw);
    let at_lo = metric(lo)?;
    if at_lo >= target {
        return Ok((lo, (lo, lo), 0, at_lo));
    }
    let cap = dbw_to_watts(opts.cap_dbw);
    let mut hi = dbw_to_watts(opts.high_dbw).min(cap);
    let mut iterations = 0;
    let mut at_hi = metric(hi)?;
    while at_hi < target {
        if hi >= cap {
            return Err(Error::Infeasible {
                target,
                reason: format!(
                    "not reached at the {:.1} dBW power cap (metric there {at_hi:.6e})",
                    opts.cap_dbw
                ),
            });
        }
        lo = hi;
        hi = (hi * 10.0).min(cap);
        at_hi = metric(hi)?;
        iterations += 1;
    }
    while hi / lo - 1.0 > opts.rel_tol {
        let mid = (lo * hi).sqrt();
        let value = metric(mid)?;
        if value >= target {
            hi = mid;
            at_hi = value;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok((hi, (lo, hi), iterations, at_hi))
}

fn plan(kind: TargetKind, target: f64, metric: impl FnMut(f64) -> Result<f64>, opts: &PlannerOptions) -> Result<PowerPlanResult> {
    let (power, bracket, iterations, achieved) = bisect(metric, target, opts)?;
    Ok(PowerPlanResult {
        target_kind: kind,
        target_value: target,
        min_power_w: power,
        min_power_dbw: watts_to_dbw(power),
        iterations,
        bracket,
        achieved_metric: achieved,
    })
}

/// Smallest HAP power with `ABDR ≥ ratio · AADR`. The achieved metric is
/// the ratio `ABDR / AADR`.
pub fn min_power_for_abdr_ratio(cfg: &NetworkConfig, ratio: f64, opts: &PlannerOptions) -> Result<PowerPlanResult> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::InvalidArgument(format!("ratio must be positive, got {ratio}")));
    }
    cfg.validate()?;
    let access = AccessAnalysis::new(cfg)?.aadr(cfg.rf_bandwidth);
    if !(access > 0.0) {
        return Err(Error::Infeasible {
            target: ratio,
            reason: "the AADR is zero, so the ratio is undefined".into(),
        });
    }
    plan(
        TargetKind::AbdrRatio,
        ratio,
        |p| Ok(abdr(&cfg.clone().with_hap_tx_power(p))? / access),
        opts,
    )
}

/// Smallest HAP power with `BREP ≥ target`.
pub fn min_power_for_brep(cfg: &NetworkConfig, target: f64, opts: &PlannerOptions) -> Result<PowerPlanResult> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!("BREP target must lie in (0, 1), got {target}")));
    }
    cfg.validate()?;
    let factors = BrepFactors::new(cfg, &AccessAnalysis::new(cfg)?)?;
    if target > factors.ceiling {
        return Err(Error::Infeasible {
            target,
            reason: format!(
                "above the BREP ceiling {:.9} set by blockage and pointing-failure mass",
                factors.ceiling
            ),
        });
    }
    plan(TargetKind::Brep, target, |p| Ok(factors.brep_at(p)), opts)
}

pub fn min_power(cfg: &NetworkConfig, kind: TargetKind, target: f64, opts: &PlannerOptions) -> Result<PowerPlanResult> {
    match kind {
        TargetKind::AbdrRatio => min_power_for_abdr_ratio(cfg, target, opts),
        TargetKind::Brep => min_power_for_brep(cfg, target, opts),
    }
}
