use std::fs::File;
use std::path::Path;

use super::{MetricsEstimate, RoundOutcome};
use crate::error::Result;

/// Writes one CSV row per round.
pub fn export_trace(outcomes: &[RoundOutcome], path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for o in outcomes {
        writer.serialize(o)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<Vec<RoundOutcome>> {
    let mut reader = csv::Reader::from_path(path)?;
    let rows = reader.deserialize().collect::<std::result::Result<Vec<RoundOutcome>, _>>()?;
    Ok(rows)
}

pub fn write_summary_json(estimate: &MetricsEstimate, path: impl AsRef<Path>) -> Result<()> {
    serde_json::to_writer_pretty(File::create(path)?, estimate)?;
    Ok(())
}
