use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use super::Scenario;
use crate::ais::{write_position_table, write_registry, IngestError};
use crate::dark::{write_detections, DarkError};
use crate::scene::{write_scenes, SceneError};

pub const TRUTH_COLUMNS: [&str; 12] = [
    "event_id",
    "vessel_a",
    "vessel_b",
    "start",
    "end",
    "mid_lat",
    "mid_lon",
    "sts_class",
    "dark",
    "suppressed_vessel",
    "scene_id",
    "bystander",
];

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Dark(#[from] DarkError),
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, ExportError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Writes `positions.csv`, `registry.csv`, `scenes.csv`, `detections.csv`
/// and `truth.csv` into `dir`, creating it if needed.
pub fn export_scenario(s: &Scenario, dir: &Path) -> Result<(), ExportError> {
    std::fs::create_dir_all(dir)?;
    let mut w = create(dir, "positions.csv")?;
    write_position_table(&mut w, &s.fixes)?;
    w.flush()?;
    let mut w = create(dir, "registry.csv")?;
    write_registry(&mut w, &s.registry)?;
    w.flush()?;
    let mut w = create(dir, "scenes.csv")?;
    write_scenes(&mut w, &s.scenes)?;
    w.flush()?;
    let mut w = create(dir, "detections.csv")?;
    write_detections(&mut w, &s.detections)?;
    w.flush()?;

    let mut w = csv::Writer::from_writer(create(dir, "truth.csv")?);
    w.write_record(TRUTH_COLUMNS)?;
    for (i, p) in s.truth.iter().enumerate() {
        let e = &p.event;
        w.write_record([
            i.to_string().as_str(),
            e.vessel_a.as_str(),
            e.vessel_b.as_str(),
            &e.start.to_string(),
            &e.end.to_string(),
            &e.midpoint.lat().to_string(),
            &e.midpoint.lon().to_string(),
            e.sts_class.as_str(),
            if p.dark { "true" } else { "false" },
            p.suppressed.as_ref().map(|v| v.as_str()).unwrap_or(""),
            &p.scene_id,
            p.bystander.as_ref().map(|v| v.as_str()).unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}
