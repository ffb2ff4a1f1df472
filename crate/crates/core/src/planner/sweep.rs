use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{min_power, PlannerOptions, PowerPlanResult, TargetKind};
use crate::analytic::{aadr, abdr, brep};
use crate::error::{Error, Result};
use crate::model::units::dbw_to_watts;
use crate::model::NetworkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxisName {
    /// km
    SatAltitude,
    SatCount,
    /// dBW
    HapTxPower,
    /// users per m²
    UserDensity,
}

impl SweepAxisName {
    /// Returns `cfg` with this parameter set to `value` (in the axis unit).
    pub fn apply(self, cfg: &NetworkConfig, value: f64) -> Result<NetworkConfig> {
        let cfg = cfg.clone();
        Ok(match self {
            SweepAxisName::SatAltitude => cfg.with_sat_altitude(value * 1e3),
            SweepAxisName::SatCount => {
                if value < 1.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
                    return Err(Error::InvalidArgument(format!("sat_count must be a positive integer, got {value}")));
                }
                cfg.with_sat_count(value as u32)
            }
            SweepAxisName::HapTxPower => cfg.with_hap_tx_power(dbw_to_watts(value)),
            SweepAxisName::UserDensity => cfg.with_user_density(value),
        })
    }
}

impl fmt::Display for SweepAxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxisName::SatAltitude => "sat_altitude",
            SweepAxisName::SatCount => "sat_count",
            SweepAxisName::HapTxPower => "hap_tx_power",
            SweepAxisName::UserDensity => "user_density",
        })
    }
}

impl FromStr for SweepAxisName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "sat_altitude" => Ok(SweepAxisName::SatAltitude),
            "sat_count" => Ok(SweepAxisName::SatCount),
            "hap_tx_power" => Ok(SweepAxisName::HapTxPower),
            "user_density" => Ok(SweepAxisName::UserDensity),
            _ => Err(Error::InvalidArgument(format!(
                "unknown sweep axis {s:?}; expected sat_altitude, sat_count, hap_tx_power or user_density"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: SweepAxisName,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(name: SweepAxisName, values: Vec<f64>) -> Self {
        SweepAxis { name, values }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Aadr,
    Abdr,
    Brep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    Metric(MetricKind),
    MinPower { kind: TargetKind, target: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellValue {
    Metric(f64),
    Power(PowerPlanResult),
    Infeasible(String),
}

impl CellValue {
    /// Minimum power in dBW, if this is a solved power cell.
    pub fn power_dbw(&self) -> Option<f64> {
        match self {
            CellValue::Power(p) => Some(p.min_power_dbw),
            _ => None,
        }
    }

    pub fn metric(&self) -> Option<f64> {
        match self {
            CellValue::Metric(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axis1: SweepAxis,
    pub axis2: SweepAxis,
    pub quantity: SweepQuantity,
    /// `cells[i][j]` belongs to `axis1.values[i]` and `axis2.values[j]`.
    pub cells: Vec<Vec<CellValue>>,
}

impl SweepGrid {
    /// Header row `axis1\axis2, v₁, v₂, …` then one row per axis-1 value.
    /// Power cells are in dBW with two decimals.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec![format!("{}\\{}", self.axis1.name, self.axis2.name)];
        header.extend(self.axis2.values.iter().map(|v| v.to_string()));
        writer.write_record(&header)?;
        for (value, row) in self.axis1.values.iter().zip(&self.cells) {
            let mut record = vec![value.to_string()];
            record.extend(row.iter().map(|cell| match cell {
                CellValue::Metric(v) => format!("{v:e}"),
                CellValue::Power(p) => format!("{:.2}", p.min_power_dbw),
                CellValue::Infeasible(_) => "infeasible".to_string(),
            }));
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn evaluate_cell(cfg: &NetworkConfig, quantity: SweepQuantity, opts: &PlannerOptions) -> Result<CellValue> {
    match quantity {
        SweepQuantity::Metric(kind) => Ok(CellValue::Metric(match kind {
            MetricKind::Aadr => aadr(cfg)?,
            MetricKind::Abdr => abdr(cfg)?,
            MetricKind::Brep => brep(cfg)?,
        })),
        SweepQuantity::MinPower { kind, target } => match min_power(cfg, kind, target, opts) {
            Ok(plan) => Ok(CellValue::Power(plan)),
            Err(Error::Infeasible { reason, .. }) => Ok(CellValue::Infeasible(reason)),
            Err(e) => Err(e),
        },
    }
}

/// Evaluates `quantity` on every cell of the grid. Cells are independent and
/// run in parallel; an infeasible target marks its cell and the sweep goes
/// on.
pub fn sweep(
    cfg: &NetworkConfig,
    axis1: SweepAxis,
    axis2: SweepAxis,
    quantity: SweepQuantity,
    opts: &PlannerOptions,
) -> Result<SweepGrid> {
    for axis in [&axis1, &axis2] {
        if axis.values.is_empty() {
            return Err(Error::InvalidArgument(format!("sweep axis {} has no values", axis.name)));
        }
    }
    if axis1.name == axis2.name {
        return Err(Error::InvalidArgument(format!("both sweep axes are {}", axis1.name)));
    }
    if matches!(quantity, SweepQuantity::MinPower { .. })
        && (axis1.name == SweepAxisName::HapTxPower || axis2.name == SweepAxisName::HapTxPower)
    {
        return Err(Error::InvalidArgument(
            "hap_tx_power cannot be a sweep axis when solving for the power".into(),
        ));
    }
    // Build every cell's config first so bad axis values fail before any
    // evaluation.
    let mut configs = Vec::with_capacity(axis1.values.len() * axis2.values.len());
    for &v1 in &axis1.values {
        let row = axis1.name.apply(cfg, v1)?;
        for &v2 in &axis2.values {
            let cell = axis2.name.apply(&row, v2)?;
            cell.validate()?;
            configs.push(cell);
        }
    }
    let flat: Vec<CellValue> = configs
        .par_iter()
        .map(|c| evaluate_cell(c, quantity, opts))
        .collect::<Result<_>>()?;
    let width = axis2.values.len();
    let cells = flat.chunks(width).map(<[CellValue]>::to_vec).collect();
    Ok(SweepGrid {
        axis1,
        axis2,
        quantity,
        cells,
    })
}
