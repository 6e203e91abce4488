//! AIS ↔ satellite scene cross-referencing and tile manifests.
//!
//! Scenes are north-up rasters with an affine model anchored at the
//! upper-left corner: pixel `x` grows east and `y` grows south, both in
//! units of `resolution` meters on the origin's tangent plane.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ais::{PositionFix, Track, VesselId};
use crate::classify::{classify_vessel, ShipClass, TileLabel};
use crate::exec::Exec;
use crate::geo::{
    bounding_box, local_offset, offset_to_geo, point_in_footprint, signed_area, GeoError, GeoPoint,
    LocalOffset,
};
use crate::sts::StsEvent;
use crate::time::Timestamp;

mod io;

pub use io::{
    load_scenes, parse_wkt_polygon, read_scenes, read_tiles_manifest, to_wkt_polygon, write_scenes,
    write_tiles_manifest,
};

/// Maximum |fix time − acquisition time| for a fix to place a vessel in a scene.
pub const MAX_MATCH_DELTA_S: i64 = 7_200;
pub const DEFAULT_TILE_BUFFER_M: f64 = 500.0;
pub const DEFAULT_CLOUD_THRESHOLD: f64 = 0.7;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("point {0} lies outside the scene bounds")]
    OutOfScene(GeoPoint),
    #[error("invalid scene {scene}: {reason}")]
    InvalidScene { scene: String, reason: String },
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),
    #[error("malformed row {row}: {reason}")]
    Malformed { row: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneMeta {
    pub scene_id: String,
    pub acquired_at: Timestamp,
    /// Ground polygon, lon/lat.
    pub footprint: Vec<GeoPoint>,
    /// Meters per pixel.
    pub resolution_m: f64,
    /// Cloud cover fraction in `[0, 1]`.
    pub cloud_score: f64,
    /// Upper-left corner of pixel (0, 0).
    pub origin: GeoPoint,
    pub width: u32,
    pub height: u32,
}

impl SceneMeta {
    /// Builds a scene whose footprint is the pixel grid's own outline.
    pub fn north_up(
        scene_id: impl Into<String>,
        acquired_at: Timestamp,
        origin: GeoPoint,
        width: u32,
        height: u32,
        resolution_m: f64,
        cloud_score: f64,
    ) -> Result<Self, SceneError> {
        let mut scene = Self {
            scene_id: scene_id.into(),
            acquired_at,
            footprint: Vec::new(),
            resolution_m,
            cloud_score,
            origin,
            width,
            height,
        };
        let (w, h) = (f64::from(width), f64::from(height));
        scene.footprint = [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)]
            .into_iter()
            .map(|(x, y)| scene.pixel_to_geo_unchecked(x, y))
            .collect::<Result<_, _>>()?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |reason: &str| {
            Err(SceneError::InvalidScene {
                scene: self.scene_id.clone(),
                reason: reason.to_owned(),
            })
        };
        if !(self.resolution_m > 0.0 && self.resolution_m.is_finite()) {
            return bad("resolution must be positive");
        }
        if !(0.0..=1.0).contains(&self.cloud_score) {
            return bad("cloud score outside [0, 1]");
        }
        if self.width == 0 || self.height == 0 {
            return bad("zero-sized raster");
        }
        if self.footprint.len() < 3 || signed_area(&self.footprint) == 0.0 {
            return bad("footprint is not a polygon");
        }
        Ok(())
    }

    /// Scenes above the cloud threshold are left out of manifests.
    pub fn is_usable(&self, cloud_threshold: f64) -> bool {
        self.cloud_score <= cloud_threshold
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        point_in_footprint(p, &self.footprint).unwrap_or(false)
    }

    fn in_bounding_box(&self, p: GeoPoint) -> bool {
        const EPS: f64 = 1e-9;
        bounding_box(&self.footprint).is_some_and(|(lat0, lon0, lat1, lon1)| {
            p.lat() >= lat0 - EPS
                && p.lat() <= lat1 + EPS
                && p.lon() >= lon0 - EPS
                && p.lon() <= lon1 + EPS
        })
    }

    /// Fractional pixel coordinates of `p`.
    pub fn geo_to_pixel(&self, p: GeoPoint) -> Result<(f64, f64), SceneError> {
        if !self.in_bounding_box(p) {
            return Err(SceneError::OutOfScene(p));
        }
        let off = local_offset(self.origin, p)?;
        Ok((off.east / self.resolution_m, -off.north / self.resolution_m))
    }

    pub fn pixel_to_geo(&self, x: f64, y: f64) -> Result<GeoPoint, SceneError> {
        let p = self.pixel_to_geo_unchecked(x, y)?;
        if !self.in_bounding_box(p) {
            return Err(SceneError::OutOfScene(p));
        }
        Ok(p)
    }

    fn pixel_to_geo_unchecked(&self, x: f64, y: f64) -> Result<GeoPoint, SceneError> {
        let off = LocalOffset::new(x * self.resolution_m, -y * self.resolution_m);
        Ok(offset_to_geo(off, self.origin)?)
    }
}

/// The fix chosen to place one vessel in one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneMatch {
    pub vessel_id: VesselId,
    pub class: ShipClass,
    pub fix: PositionFix,
    /// `fix.t − acquired_at`, seconds.
    pub delta_s: i64,
}

/// Per vessel, the fix closest in time to the acquisition (earlier fix on
/// ties), kept if within `max_delta_s` and inside the footprint.
pub fn match_fixes_to_scene(
    scene: &SceneMeta,
    tracks: &[Track],
    max_delta_s: i64,
) -> Vec<SceneMatch> {
    tracks
        .iter()
        .filter_map(|tr| {
            let fix = nearest_fix(&tr.fixes, scene.acquired_at)?;
            let delta_s = fix.t - scene.acquired_at;
            if delta_s.abs() > max_delta_s || !scene.contains(fix.pos) {
                return None;
            }
            Some(SceneMatch {
                vessel_id: tr.id().clone(),
                class: classify_vessel(&tr.vessel),
                fix: fix.clone(),
                delta_s,
            })
        })
        .collect()
}

fn nearest_fix(fixes: &[PositionFix], t: Timestamp) -> Option<&PositionFix> {
    let i = fixes.partition_point(|f| f.t < t);
    let after = fixes.get(i);
    let before = i.checked_sub(1).and_then(|j| fixes.get(j));
    match (before, after) {
        (Some(b), Some(a)) => Some(if a.t - t < t - b.t { a } else { b }),
        (b, a) => b.or(a),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileParams {
    /// Meters from the tile center to each edge.
    pub buffer_m: f64,
    /// Largest |fix time - acquisition time| accepted as a match, seconds.
    pub match_window_s: i64,
}

impl Default for TileParams {
    fn default() -> Self {
        Self {
            buffer_m: DEFAULT_TILE_BUFFER_M,
            match_window_s: MAX_MATCH_DELTA_S,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelWindow {
    pub x0: u32,
    pub y0: u32,
    pub w: u32,
    pub h: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileRecord {
    pub scene_id: String,
    pub center: GeoPoint,
    /// Side length, meters.
    pub extent_m: f64,
    pub window: PixelWindow,
    pub label: TileLabel,
    /// One id for a lone vessel, two for a transfer.
    pub vessels: Vec<VesselId>,
    pub ais_time_delta_s: i64,
}

/// Tile side in pixels for a given ground extent (rounded up).
pub fn tile_side_px(extent_m: f64, resolution_m: f64) -> u32 {
    // the epsilon keeps exact multiples from rounding up a pixel
    (extent_m / resolution_m - 1e-9).ceil().max(1.0) as u32
}

fn window_around(scene: &SceneMeta, cx: f64, cy: f64, side: u32) -> PixelWindow {
    let place = |c: f64, limit: u32| -> (u32, u32) {
        if side >= limit {
            return (0, limit);
        }
        let start = (c - f64::from(side) / 2.0).round();
        let start = start.clamp(0.0, f64::from(limit - side)) as u32;
        (start, side)
    };
    let (x0, w) = place(cx, scene.width);
    let (y0, h) = place(cy, scene.height);
    PixelWindow { x0, y0, w, h }
}

/// Cuts tiles for one scene.
///
/// Each event active at acquisition time with at least one matched
/// participant yields one transfer tile on the event midpoint. Matched
/// vessels outside active events yield single-vessel tiles. Vessels and
/// events outside the six-class taxonomy yield nothing.
pub fn make_tiles(
    scene: &SceneMeta,
    matches: &[SceneMatch],
    events: &[StsEvent],
    params: &TileParams,
) -> Vec<TileRecord> {
    let extent_m = 2.0 * params.buffer_m;
    let side = tile_side_px(extent_m, scene.resolution_m);
    let mut tiles = Vec::new();
    let mut consumed: BTreeSet<&VesselId> = BTreeSet::new();
    let mut seen_events = BTreeSet::new();

    for ev in events.iter().filter(|e| e.is_active_at(scene.acquired_at)) {
        let participants: Vec<&SceneMatch> = matches
            .iter()
            .filter(|m| ev.involves(&m.vessel_id))
            .collect();
        if participants.is_empty() {
            continue;
        }
        consumed.insert(&ev.vessel_a);
        consumed.insert(&ev.vessel_b);
        if !seen_events.insert(ev.key()) {
            continue;
        }
        let Some(label) = ev.sts_class.tile_label() else {
            continue;
        };
        let Ok((cx, cy)) = scene.geo_to_pixel(ev.midpoint) else {
            continue;
        };
        let delta = participants
            .iter()
            .map(|m| m.delta_s)
            .max_by_key(|d| d.abs())
            .unwrap_or(0);
        tiles.push(TileRecord {
            scene_id: scene.scene_id.clone(),
            center: ev.midpoint,
            extent_m,
            window: window_around(scene, cx, cy, side),
            label,
            vessels: vec![ev.vessel_a.clone(), ev.vessel_b.clone()],
            ais_time_delta_s: delta,
        });
    }

    for m in matches.iter().filter(|m| !consumed.contains(&m.vessel_id)) {
        let Some(label) = m.class.tile_label() else {
            continue;
        };
        let Ok((cx, cy)) = scene.geo_to_pixel(m.fix.pos) else {
            continue;
        };
        tiles.push(TileRecord {
            scene_id: scene.scene_id.clone(),
            center: m.fix.pos,
            extent_m,
            window: window_around(scene, cx, cy, side),
            label,
            vessels: vec![m.vessel_id.clone()],
            ais_time_delta_s: m.delta_s,
        });
    }
    tiles
}

/// Match-and-tile over many scenes. Cloudy scenes are skipped; output is
/// ordered by scene id regardless of execution mode.
pub fn tile_scenes(
    scenes: &[SceneMeta],
    tracks: &[Track],
    events: &[StsEvent],
    params: &TileParams,
    cloud_threshold: f64,
    exec: Exec,
) -> Vec<TileRecord> {
    let mut usable: Vec<&SceneMeta> = scenes
        .iter()
        .filter(|s| s.is_usable(cloud_threshold))
        .collect();
    usable.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));
    exec.map(&usable, |scene| {
        let matches = match_fixes_to_scene(scene, tracks, params.match_window_s);
        make_tiles(scene, &matches, events, params)
    })
    .into_iter()
    .flatten()
    .collect()
}
