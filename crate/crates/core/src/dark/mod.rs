//! Dark transfer audit: detections from an external imagery model are
//! checked against AIS presence around them.
//!
//! A transfer detection is dark when fewer than `min_identities` distinct
//! vessel ids report a fix within `radius_m` of the detection center and
//! `window_s` of the acquisition time. Draught changes of the vessels that
//! are present are collected as corroborating evidence only.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use thiserror::Error;

use crate::ais::{PositionFix, Track, VesselId};
use crate::classify::TileLabel;
use crate::exec::Exec;
use crate::geo::{haversine_distance, GeoPoint};
use crate::time::Timestamp;

mod index;
mod io;

pub use index::FixIndex;
pub use io::{
    dark_report_geojson, dark_summary_json, load_detections, read_detections, write_detections,
    write_report,
};

/// Default audit half-window, ±12 h.
pub const DEFAULT_WINDOW_S: i64 = 43_200;

#[derive(Debug, Error)]
pub enum DarkError {
    #[error("row {row}: scene {scene_id:?} is not in the scenes table")]
    MissingScene { row: usize, scene_id: String },
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("detection in scene {scene_id} is labeled {label}, not a transfer class")]
    NotAnStsDetection { scene_id: String, label: TileLabel },
    #[error("invalid audit parameters: {0}")]
    InvalidParams(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// Axis-aligned box in scene pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn center(&self) -> (f64, f64) {
        (self.x0 + self.w / 2.0, self.y0 + self.h / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub scene_id: String,
    pub label: TileLabel,
    pub bbox: BBox,
    pub confidence: f64,
    /// Ground position of the box center.
    pub geo_center: GeoPoint,
    /// Copied from the scene.
    pub acquired_at: Timestamp,
    /// Copied from the scene, meters per pixel.
    pub resolution_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditParams {
    pub radius_m: f64,
    /// Half-width of the time window, seconds.
    pub window_s: i64,
    pub min_identities: usize,
}

impl Default for AuditParams {
    fn default() -> Self {
        Self {
            radius_m: 500.0,
            window_s: DEFAULT_WINDOW_S,
            min_identities: 2,
        }
    }
}

impl AuditParams {
    pub fn validate(&self) -> Result<(), DarkError> {
        if !(self.radius_m > 0.0 && self.radius_m.is_finite())
            || self.window_s <= 0
            || self.min_identities == 0
        {
            return Err(DarkError::InvalidParams(format!("{self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkVerdict {
    pub detection: Detection,
    pub distinct_identities: BTreeSet<VesselId>,
    pub is_dark: bool,
    /// Last minus first draught inside the evidence window, per present vessel.
    pub draught_deltas: Vec<(VesselId, f64)>,
    pub evidence_window: (Timestamp, Timestamp),
}

fn ensure_sts(d: &Detection) -> Result<(), DarkError> {
    if d.label.is_sts() {
        Ok(())
    } else {
        Err(DarkError::NotAnStsDetection {
            scene_id: d.scene_id.clone(),
            label: d.label,
        })
    }
}

fn evidence_window(d: &Detection, params: &AuditParams) -> (Timestamp, Timestamp) {
    (
        d.acquired_at - params.window_s,
        d.acquired_at + params.window_s,
    )
}

fn in_window(fixes: &[PositionFix], (lo, hi): (Timestamp, Timestamp)) -> &[PositionFix] {
    let a = fixes.partition_point(|f| f.t < lo);
    let b = fixes.partition_point(|f| f.t <= hi);
    &fixes[a..b.max(a)]
}

fn draught_delta(fixes: &[PositionFix], window: (Timestamp, Timestamp)) -> Option<f64> {
    let w = in_window(fixes, window);
    Some(w.last()?.draught? - w.first()?.draught?)
}

fn verdict(
    d: &Detection,
    tracks: &[Track],
    present: BTreeSet<usize>,
    params: &AuditParams,
) -> DarkVerdict {
    let window = evidence_window(d, params);
    let draught_deltas = present
        .iter()
        .filter_map(|&i| {
            Some((
                tracks[i].id().clone(),
                draught_delta(&tracks[i].fixes, window)?,
            ))
        })
        .collect();
    let distinct_identities: BTreeSet<VesselId> =
        present.iter().map(|&i| tracks[i].id().clone()).collect();
    DarkVerdict {
        detection: d.clone(),
        is_dark: distinct_identities.len() < params.min_identities,
        distinct_identities,
        draught_deltas,
        evidence_window: window,
    }
}

/// Audits one detection by scanning every track.
pub fn audit_detection(
    d: &Detection,
    tracks: &[Track],
    params: &AuditParams,
) -> Result<DarkVerdict, DarkError> {
    ensure_sts(d)?;
    let window = evidence_window(d, params);
    let present: BTreeSet<usize> = tracks
        .iter()
        .enumerate()
        .filter(|(_, tr)| {
            in_window(&tr.fixes, window)
                .iter()
                .any(|f| haversine_distance(f.pos, d.geo_center) <= params.radius_m)
        })
        .map(|(i, _)| i)
        .collect();
    Ok(verdict(d, tracks, present, params))
}

/// Audits against a prebuilt spatial index; same result as [`audit_detection`].
pub struct DarkAuditor<'a> {
    tracks: &'a [Track],
    params: AuditParams,
    index: FixIndex,
}

impl<'a> DarkAuditor<'a> {
    pub fn new(tracks: &'a [Track], params: AuditParams) -> Self {
        Self {
            tracks,
            params,
            index: FixIndex::build(tracks, params.radius_m),
        }
    }

    pub fn audit(&self, d: &Detection) -> Result<DarkVerdict, DarkError> {
        ensure_sts(d)?;
        let present = self.index.vessels_near(
            d.geo_center,
            self.params.radius_m,
            evidence_window(d, &self.params),
        );
        Ok(verdict(d, self.tracks, present, &self.params))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DayCount {
    pub sts: usize,
    pub dark: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkStsReport {
    pub params: AuditParams,
    pub total_detections: usize,
    pub sts_detections: usize,
    pub dark_count: usize,
    /// All detections by label, audited or not.
    pub class_census: BTreeMap<TileLabel, usize>,
    /// One verdict per transfer detection, in input order.
    pub verdicts: Vec<DarkVerdict>,
    /// Number of dark verdicts each present vessel appears in.
    pub per_vessel_dark: BTreeMap<VesselId, usize>,
    pub timeline: BTreeMap<NaiveDate, DayCount>,
    pub notes: Vec<String>,
}

pub fn scan(detections: &[Detection], tracks: &[Track], params: &AuditParams) -> DarkStsReport {
    scan_with(detections, tracks, params, Exec::Sequential)
}

pub fn scan_with(
    detections: &[Detection],
    tracks: &[Track],
    params: &AuditParams,
    exec: Exec,
) -> DarkStsReport {
    let mut class_census = BTreeMap::new();
    for d in detections {
        *class_census.entry(d.label).or_insert(0) += 1;
    }
    let sts: Vec<&Detection> = detections.iter().filter(|d| d.label.is_sts()).collect();
    let auditor = DarkAuditor::new(tracks, *params);
    let verdicts: Vec<DarkVerdict> = exec
        .map(&sts, |d| auditor.audit(d))
        .into_iter()
        .collect::<Result<_, _>>()
        .expect("only transfer detections are audited");

    let mut per_vessel_dark = BTreeMap::new();
    let mut timeline: BTreeMap<NaiveDate, DayCount> = BTreeMap::new();
    for v in &verdicts {
        let day = timeline.entry(v.detection.acquired_at.date()).or_default();
        day.sts += 1;
        if v.is_dark {
            day.dark += 1;
            for id in &v.distinct_identities {
                *per_vessel_dark.entry(id.clone()).or_insert(0) += 1;
            }
        }
    }

    let mut notes = Vec::new();
    if params.window_s != DEFAULT_WINDOW_S {
        notes.push(format!(
            "audit window overridden to ±{} h (default ±{} h)",
            params.window_s as f64 / 3600.0,
            DEFAULT_WINDOW_S / 3600
        ));
    }

    DarkStsReport {
        params: *params,
        total_detections: detections.len(),
        sts_detections: verdicts.len(),
        dark_count: verdicts.iter().filter(|v| v.is_dark).count(),
        class_census,
        verdicts,
        per_vessel_dark,
        timeline,
        notes,
    }
}
