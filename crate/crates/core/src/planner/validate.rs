use serde::{Deserialize, Serialize};

use crate::analytic::{analytic_metrics, AnalyticMetrics};
use crate::error::{Error, Result};
use crate::model::NetworkConfig;
use crate::montecarlo::{estimate_metrics, MetricsEstimate, SimulationOptions};

pub const MIN_VALIDATION_ROUNDS: usize = 1000;

/// Relative gap allowed between the analytic AADR and the simulated
/// linearized access rate.
pub const AADR_LINEAR_REL_TOL: f64 = 0.015;
pub const AADR_EXACT_REL_TOL: f64 = 0.05;
pub const ABDR_REL_TOL: f64 = 0.01;
pub const BREP_ABS_TOL: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub metric: String,
    pub analytic: f64,
    pub simulated: f64,
    /// 95% half-width of the simulated value.
    pub half_width: f64,
    pub abs_gap: f64,
    /// `abs_gap / |simulated|`; absent when the simulated value is zero.
    pub rel_gap: Option<f64>,
    pub tolerance: String,
    pub pass: bool,
}

impl ValidationRow {
    fn new(metric: &str, analytic: f64, simulated: f64, half_width: f64, rel_tol: Option<f64>, abs_tol: Option<f64>) -> Self {
        let abs_gap = (analytic - simulated).abs();
        let rel_gap = if simulated == 0.0 {
            (abs_gap == 0.0).then_some(0.0)
        } else {
            Some(abs_gap / simulated.abs())
        };
        let (tolerance, pass) = match (rel_tol, abs_tol) {
            (Some(r), _) => (format!("relative {r}"), rel_gap.is_some_and(|g| g <= r)),
            (None, Some(a)) => (format!("absolute {a}"), abs_gap <= a),
            (None, None) => ("none".to_string(), true),
        };
        ValidationRow {
            metric: metric.to_string(),
            analytic,
            simulated,
            half_width,
            abs_gap,
            rel_gap,
            tolerance,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub config_hash: String,
    pub rounds: usize,
    pub seed: u64,
    pub rows: Vec<ValidationRow>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "config {}  rounds {}  seed {}\n{:<13} {:>16} {:>16} {:>14} {:>10}  {:<16} {}\n",
            &self.config_hash[..12.min(self.config_hash.len())],
            self.rounds,
            self.seed,
            "metric",
            "analytic",
            "simulated",
            "±95%",
            "gap",
            "tolerance",
            "result"
        );
        for r in &self.rows {
            let gap = match r.rel_gap {
                Some(g) if r.tolerance.starts_with("relative") => format!("{:.3}%", 100.0 * g),
                None if r.tolerance.starts_with("relative") => "n/a".to_string(),
                _ => format!("{:.4}", r.abs_gap),
            };
            out += &format!(
                "{:<13} {:>16.6e} {:>16.6e} {:>14.3e} {:>10}  {:<16} {}\n",
                r.metric,
                r.analytic,
                r.simulated,
                r.half_width,
                gap,
                r.tolerance,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out += if self.pass { "overall: pass\n" } else { "overall: FAIL\n" };
        out
    }
}

/// Puts analytic and simulated metrics side by side. Refuses to compare
/// results computed from different configs.
pub fn compare(analytic: &AnalyticMetrics, simulated: &MetricsEstimate) -> Result<ValidationReport> {
    if analytic.config_hash != simulated.config_hash {
        return Err(Error::ConfigMismatch {
            analytic: analytic.config_hash.clone(),
            simulated: simulated.config_hash.clone(),
        });
    }
    let rows = vec![
        ValidationRow::new(
            "aadr_linear",
            analytic.aadr,
            simulated.aadr_linear.mean,
            simulated.aadr_linear.half_width,
            Some(AADR_LINEAR_REL_TOL),
            None,
        ),
        ValidationRow::new(
            "aadr_exact",
            analytic.aadr,
            simulated.aadr_exact.mean,
            simulated.aadr_exact.half_width,
            Some(AADR_EXACT_REL_TOL),
            None,
        ),
        ValidationRow::new(
            "abdr",
            analytic.abdr,
            simulated.abdr.mean,
            simulated.abdr.half_width,
            Some(ABDR_REL_TOL),
            None,
        ),
        ValidationRow::new(
            "brep",
            analytic.brep,
            simulated.brep.mean,
            simulated.brep.half_width,
            None,
            Some(BREP_ABS_TOL),
        ),
    ];
    let notes = vec![
        "The analytic AADR rests on an upper bound of the Gamma CDF and sits a few percent above simulation."
            .to_string(),
        format!(
            "Analytic BREP before clamping: {:.6e}; ceiling {:.9}.",
            analytic.diagnostics.brep_unclamped, analytic.diagnostics.brep_ceiling
        ),
    ];
    Ok(ValidationReport {
        config_hash: analytic.config_hash.clone(),
        rounds: simulated.rounds,
        seed: simulated.seed,
        pass: rows.iter().all(|r| r.pass),
        rows,
        notes,
    })
}

/// Runs the analytic pipeline and a simulation of `rounds` rounds and
/// compares them.
pub fn validate(cfg: &NetworkConfig, rounds: usize, seed: u64) -> Result<ValidationReport> {
    if rounds < MIN_VALIDATION_ROUNDS {
        return Err(Error::InvalidArgument(format!(
            "validation needs at least {MIN_VALIDATION_ROUNDS} rounds, got {rounds}"
        )));
    }
    let analytic = analytic_metrics(cfg)?;
    let simulated = estimate_metrics(
        cfg,
        &SimulationOptions {
            rounds,
            seed,
            ..SimulationOptions::default()
        },
    )?;
    compare(&analytic, &simulated)
}
