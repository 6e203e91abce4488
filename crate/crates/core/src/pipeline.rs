//! Whole-pipeline run over a synthetic scenario, checked against its
//! planted truth.
//!
//! Every stage reads the files the previous stage wrote, so the run covers
//! the on-disk formats as well as the algorithms.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;

use crate::ais::{build_tracks, load_position_table_with, load_registry, IngestError, VesselId};
use crate::classify::TileLabel;
use crate::dark::{
    load_detections, scan_with, write_report, AuditParams, DarkError, DarkStsReport,
};
use crate::exec::Exec;
use crate::scene::{
    load_scenes, tile_scenes, write_tiles_manifest, SceneError, TileParams, TileRecord,
};
use crate::sts::{
    detect_sts_with, write_events_csv, write_events_geojson, StsError, StsEvent, StsParams,
};
use crate::synth::{
    export_scenario, generate_scenario, ConfigInvalid, ExportError, Scenario, SynthConfig,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigInvalid),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Sts(#[from] StsError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Dark(#[from] DarkError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct E2eConfig {
    pub synth: SynthConfig,
    pub sts: StsParams,
    pub audit: AuditParams,
    pub tiles: TileParams,
    pub cloud_threshold: f64,
    pub exec: Exec,
}

impl Default for E2eConfig {
    fn default() -> Self {
        Self {
            synth: SynthConfig {
                vessels: 30,
                sts_events: 10,
                dark_fraction: 0.4,
                ..Default::default()
            },
            sts: StsParams::default(),
            audit: AuditParams::default(),
            tiles: TileParams::default(),
            cloud_threshold: crate::scene::DEFAULT_CLOUD_THRESHOLD,
            exec: Exec::Sequential,
        }
    }
}

/// Outputs of each stage plus the comparison with the planted truth.
#[derive(Debug, Clone)]
pub struct E2eOutcome {
    pub scenario: Scenario,
    pub events: Vec<StsEvent>,
    pub tiles: Vec<TileRecord>,
    pub report: DarkStsReport,
    pub planted_dark: usize,
    /// Empty when the run matches its truth.
    pub mismatches: Vec<String>,
}

impl E2eOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Paths of a scenario directory.
#[derive(Debug, Clone)]
pub struct ScenarioFiles {
    pub positions: PathBuf,
    pub registry: PathBuf,
    pub scenes: PathBuf,
    pub detections: PathBuf,
    pub truth: PathBuf,
}

impl ScenarioFiles {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            positions: dir.join("positions.csv"),
            registry: dir.join("registry.csv"),
            scenes: dir.join("scenes.csv"),
            detections: dir.join("detections.csv"),
            truth: dir.join("truth.csv"),
        }
    }
}

/// synth → ingest → detect → tile → dark scan, with outputs under `out_dir`.
pub fn run_e2e(
    seed: u64,
    config: &E2eConfig,
    out_dir: &Path,
    run_config: Option<&Value>,
) -> Result<E2eOutcome, PipelineError> {
    let scenario = generate_scenario(seed, &config.synth)?;
    let scenario_dir = out_dir.join("scenario");
    export_scenario(&scenario, &scenario_dir)?;
    let files = ScenarioFiles::in_dir(&scenario_dir);

    let positions = load_position_table_with(&files.positions, config.exec)?;
    let registry = load_registry(&files.registry)?;
    let tracks = build_tracks(&positions.fixes, &registry.records);

    config.sts.validate()?;
    let events = detect_sts_with(&tracks, &config.sts, config.exec);
    let mut w = BufWriter::new(File::create(out_dir.join("sts_events.csv"))?);
    write_events_csv(&mut w, &events)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(out_dir.join("sts_events.geojson"))?);
    write_events_geojson(&mut w, &events, run_config)?;
    w.flush()?;

    let scenes = load_scenes(&files.scenes)?;
    let tiles = tile_scenes(
        &scenes,
        &tracks,
        &events,
        &config.tiles,
        config.cloud_threshold,
        config.exec,
    );
    let mut w = BufWriter::new(File::create(out_dir.join("tiles_manifest.csv"))?);
    write_tiles_manifest(&mut w, &tiles)?;
    w.flush()?;

    config.audit.validate()?;
    let detections = load_detections(&files.detections, &scenes)?;
    let report = scan_with(&detections, &tracks, &config.audit, config.exec);
    write_report(out_dir, &report, run_config)?;

    let mismatches = compare(&scenario, &events, &tiles, &report);
    Ok(E2eOutcome {
        planted_dark: scenario.dark_count(),
        scenario,
        events,
        tiles,
        report,
        mismatches,
    })
}

fn pair(a: &VesselId, b: &VesselId) -> (VesselId, VesselId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Lists every way the stage outputs disagree with the planted truth.
pub fn compare(
    scenario: &Scenario,
    events: &[StsEvent],
    tiles: &[TileRecord],
    report: &DarkStsReport,
) -> Vec<String> {
    let mut out = Vec::new();

    let visible: Vec<&StsEvent> = scenario
        .truth
        .iter()
        .filter(|p| !p.dark)
        .map(|p| &p.event)
        .collect();
    let planted: BTreeSet<_> = visible
        .iter()
        .map(|e| pair(&e.vessel_a, &e.vessel_b))
        .collect();
    let found: BTreeSet<_> = events
        .iter()
        .map(|e| pair(&e.vessel_a, &e.vessel_b))
        .collect();
    for p in planted.difference(&found) {
        out.push(format!("planted transfer {} / {} not detected", p.0, p.1));
    }
    for p in found.difference(&planted) {
        out.push(format!(
            "detected transfer {} / {} was not planted",
            p.0, p.1
        ));
    }
    if events.len() != found.len() {
        out.push(format!(
            "{} events over {} distinct pairs",
            events.len(),
            found.len()
        ));
    }
    for e in events {
        if let Some(t) = visible
            .iter()
            .find(|t| pair(&t.vessel_a, &t.vessel_b) == pair(&e.vessel_a, &e.vessel_b))
        {
            if e.end < t.start || e.start > t.end {
                out.push(format!(
                    "detected {} / {} at {}..{} misses planted {}..{}",
                    e.vessel_a, e.vessel_b, e.start, e.end, t.start, t.end
                ));
            }
            if e.sts_class != t.sts_class {
                out.push(format!(
                    "class {} != planted {}",
                    e.sts_class.as_str(),
                    t.sts_class.as_str()
                ));
            }
        }
    }

    let mut census: BTreeMap<TileLabel, usize> = BTreeMap::new();
    for t in tiles {
        *census.entry(t.label).or_insert(0) += 1;
    }
    let expected = scenario.expected_tile_census();
    if census != expected {
        out.push(format!("tile census {census:?} != expected {expected:?}"));
    }

    let dark_scenes: BTreeSet<&str> = scenario
        .truth_dark()
        .iter()
        .map(|p| p.scene_id.as_str())
        .collect();
    let sts_scenes: BTreeSet<&str> = scenario.truth.iter().map(|p| p.scene_id.as_str()).collect();
    if report.dark_count != dark_scenes.len() {
        out.push(format!(
            "dark count {} != planted {}",
            report.dark_count,
            dark_scenes.len()
        ));
    }
    for v in &report.verdicts {
        let id = v.detection.scene_id.as_str();
        if !sts_scenes.contains(id) {
            out.push(format!("transfer detection in unplanted scene {id}"));
        } else if v.is_dark != dark_scenes.contains(id) {
            out.push(format!(
                "scene {id}: verdict dark={} but planted dark={}",
                v.is_dark,
                dark_scenes.contains(id)
            ));
        }
    }
    out
}
