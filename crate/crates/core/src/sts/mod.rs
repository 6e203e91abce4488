//! Ship-to-ship transfer detection on AIS tracks.
//!
//! Two vessels are "together" at a time-grid instant when both move slower
//! than `max_sog` and lie within `max_distance` of each other. Runs of
//! together-instants (allowing holes up to `max_gap`) that last at least
//! `min_duration` become [`StsEvent`]s.
//!
//! [`detect_sts`] buckets each time slice into a uniform lat/lon grid and
//! only tests neighbouring cells; [`brute_force_sts`] checks every pair at
//! every instant and serves as the reference.

use thiserror::Error;

use crate::ais::{Track, VesselId};
use crate::classify::{classify_sts, classify_vessel, StsClass};
use crate::exec::Exec;
use crate::geo::{lon_delta, GeoPoint};
use crate::time::Timestamp;

mod grid;
mod io;
mod oracle;

pub use io::{events_geojson, read_events_csv, write_events_csv, write_events_geojson};
pub use oracle::brute_force_sts;

#[derive(Debug, Error)]
pub enum StsError {
    #[error("invalid STS parameters: {0}")]
    InvalidParams(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed events row {row}: {reason}")]
    Malformed { row: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StsParams {
    /// Meters, inclusive.
    pub max_distance_m: f64,
    /// Seconds, inclusive.
    pub min_duration_s: i64,
    /// Knots, strict.
    pub max_sog_kn: f64,
    pub resample_step_s: i64,
    pub max_gap_s: i64,
}

impl Default for StsParams {
    fn default() -> Self {
        Self {
            max_distance_m: 500.0,
            min_duration_s: 7_200,
            max_sog_kn: 1.0,
            resample_step_s: 300,
            max_gap_s: 1_800,
        }
    }
}

impl StsParams {
    pub fn validate(&self) -> Result<(), StsError> {
        let bad = |m: &str| Err(StsError::InvalidParams(m.to_owned()));
        if !(self.max_distance_m > 0.0 && self.max_distance_m.is_finite()) {
            return bad("max_distance must be positive");
        }
        if !(self.max_sog_kn > 0.0 && self.max_sog_kn.is_finite()) {
            return bad("max_sog must be positive");
        }
        if self.min_duration_s <= 0 || self.resample_step_s <= 0 || self.max_gap_s <= 0 {
            return bad("durations must be positive");
        }
        if self.resample_step_s > self.min_duration_s {
            return bad("resample_step must not exceed min_duration");
        }
        if self.max_gap_s >= self.min_duration_s {
            return bad("max_gap must be below min_duration");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StsEvent {
    /// Lexicographically smaller of the two ids.
    pub vessel_a: VesselId,
    pub vessel_b: VesselId,
    pub start: Timestamp,
    pub end: Timestamp,
    /// Mean of the pair midpoints over the together-instants.
    pub midpoint: GeoPoint,
    pub sts_class: StsClass,
    pub mean_separation_m: f64,
}

impl StsEvent {
    pub fn duration_s(&self) -> i64 {
        self.end - self.start
    }

    /// `(vessel_a, vessel_b, start, end)`, the identity used for set comparison.
    pub fn key(&self) -> (VesselId, VesselId, Timestamp, Timestamp) {
        (
            self.vessel_a.clone(),
            self.vessel_b.clone(),
            self.start,
            self.end,
        )
    }

    pub fn involves(&self, id: &VesselId) -> bool {
        &self.vessel_a == id || &self.vessel_b == id
    }

    pub fn is_active_at(&self, t: Timestamp) -> bool {
        self.start <= t && t <= self.end
    }
}

/// One point of a track resampled onto the common time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample {
    pub t: Timestamp,
    pub pos: GeoPoint,
    pub sog: f64,
}

/// Interpolates a track at every multiple of `step` seconds (Unix epoch
/// based, so all tracks share instants). Positions are interpolated
/// linearly on the tangent plane of the earlier fix. Only segments whose
/// fixes are at most `max_gap` apart contribute; nothing is extrapolated.
pub fn resample_track(track: &Track, step: i64, max_gap: i64) -> Vec<GridSample> {
    let fixes = &track.fixes;
    let span_s = match (fixes.first(), fixes.last()) {
        (Some(a), Some(b)) => (b.t - a.t).max(0),
        _ => 0,
    };
    let mut out = Vec::with_capacity((span_s / step + 1) as usize);
    let mut next_allowed = i64::MIN;
    for seg in fixes.windows(2) {
        let (f0, f1) = (&seg[0], &seg[1]);
        let dt = f1.t - f0.t;
        if dt <= 0 || dt > max_gap {
            continue;
        }
        let first = ceil_to_multiple(f0.t.unix(), step).max(next_allowed);
        if first > f1.t.unix() {
            continue;
        }
        // on the equirectangular plane of f0, straight lines are linear in
        // latitude and (unwrapped) longitude
        let dlat = f1.pos.lat() - f0.pos.lat();
        let dlon = lon_delta(f0.pos.lon(), f1.pos.lon());
        let dsog = f1.sog - f0.sog;
        let mut g = first;
        while g <= f1.t.unix() {
            let frac = (g - f0.t.unix()) as f64 / dt as f64;
            let pos = if frac == 0.0 {
                f0.pos
            } else {
                GeoPoint::new(f0.pos.lat() + dlat * frac, f0.pos.lon() + dlon * frac)
                    .unwrap_or(f0.pos)
            };
            out.push(GridSample {
                t: Timestamp(g),
                pos,
                sog: f0.sog + frac * dsog,
            });
            g += step;
        }
        next_allowed = g;
    }
    out
}

fn ceil_to_multiple(t: i64, step: i64) -> i64 {
    let r = t.rem_euclid(step);
    if r == 0 {
        t
    } else {
        t + (step - r)
    }
}

pub(crate) fn midpoint(a: GeoPoint, b: GeoPoint) -> (f64, f64) {
    (
        0.5 * (a.lat() + b.lat()),
        a.lon() + 0.5 * lon_delta(a.lon(), b.lon()),
    )
}

/// Accumulates together-instants of one pair into events.
pub(crate) struct RunBuilder<'p> {
    params: &'p StsParams,
    run: Option<Run>,
}

struct Run {
    start: i64,
    last: i64,
    n: usize,
    sum_lat: f64,
    sum_dlon: f64,
    ref_lon: f64,
    sum_sep: f64,
}

impl<'p> RunBuilder<'p> {
    pub(crate) fn new(params: &'p StsParams) -> Self {
        Self { params, run: None }
    }

    /// Instants must arrive in increasing time order. Returns a finished
    /// run when this instant starts a new one.
    pub(crate) fn push(
        &mut self,
        t: i64,
        mid: (f64, f64),
        sep: f64,
    ) -> Option<(i64, i64, GeoPoint, f64)> {
        let finished = match &self.run {
            Some(r) if t - r.last > self.params.max_gap_s => self.take(),
            _ => None,
        };
        let run = self.run.get_or_insert(Run {
            start: t,
            last: t,
            n: 0,
            sum_lat: 0.0,
            sum_dlon: 0.0,
            ref_lon: mid.1,
            sum_sep: 0.0,
        });
        run.last = t;
        run.n += 1;
        run.sum_lat += mid.0;
        run.sum_dlon += lon_delta(run.ref_lon, mid.1);
        run.sum_sep += sep;
        finished
    }

    /// Closes the current run; `Some` only if it lasted `min_duration`.
    pub(crate) fn take(&mut self) -> Option<(i64, i64, GeoPoint, f64)> {
        let r = self.run.take()?;
        if r.last - r.start < self.params.min_duration_s {
            return None;
        }
        let n = r.n as f64;
        let mid = GeoPoint::new(r.sum_lat / n, r.ref_lon + r.sum_dlon / n).ok()?;
        Some((r.start, r.last, mid, r.sum_sep / n))
    }
}

pub(crate) fn make_event(
    a: &Track,
    b: &Track,
    (start, end, midpoint, sep): (i64, i64, GeoPoint, f64),
) -> StsEvent {
    StsEvent {
        vessel_a: a.id().clone(),
        vessel_b: b.id().clone(),
        start: Timestamp(start),
        end: Timestamp(end),
        midpoint,
        sts_class: classify_sts(classify_vessel(&a.vessel), classify_vessel(&b.vessel)),
        mean_separation_m: sep,
    }
}

/// Indices of `tracks` sorted by vessel id; ties keep input order.
pub(crate) fn canonical_order(tracks: &[Track]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..tracks.len()).collect();
    order.sort_by(|&i, &j| tracks[i].id().cmp(tracks[j].id()));
    order
}

pub(crate) fn sort_events(events: &mut [StsEvent]) {
    events.sort_by_key(StsEvent::key);
}

pub fn detect_sts(tracks: &[Track], params: &StsParams) -> Vec<StsEvent> {
    detect_sts_with(tracks, params, Exec::Sequential)
}

/// Grid-indexed detection. Output is sorted by `(vessel_a, vessel_b, start)`
/// and identical for both execution modes.
pub fn detect_sts_with(tracks: &[Track], params: &StsParams, exec: Exec) -> Vec<StsEvent> {
    let order = canonical_order(tracks);
    let sorted: Vec<&Track> = order.iter().map(|&i| &tracks[i]).collect();
    let resampled = exec.map(&sorted, |t| {
        resample_track(t, params.resample_step_s, params.max_gap_s)
    });
    let slices = grid::SliceTable::build(&resampled, params);
    let hits = grid::together_hits(&slices, params, exec);

    let mut events = Vec::new();
    let mut i = 0;
    while i < hits.len() {
        let pair = (hits[i].a, hits[i].b);
        let mut builder = RunBuilder::new(params);
        let (ta, tb) = (sorted[pair.0 as usize], sorted[pair.1 as usize]);
        while i < hits.len() && (hits[i].a, hits[i].b) == pair {
            let h = &hits[i];
            if let Some(run) = builder.push(h.t, h.mid, h.sep) {
                events.push(make_event(ta, tb, run));
            }
            i += 1;
        }
        if let Some(run) = builder.take() {
            events.push(make_event(ta, tb, run));
        }
    }
    sort_events(&mut events);
    events
}
