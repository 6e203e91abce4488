//! Uniform lat/lon grid over every fix, time-sorted within each cell.

use std::collections::{BTreeSet, HashMap};

use crate::ais::Track;
use crate::geo::{haversine_distance, GeoPoint, METERS_PER_DEGREE};
use crate::time::Timestamp;

#[derive(Debug, Clone, Copy)]
struct Entry {
    t: Timestamp,
    track: u32,
    pos: GeoPoint,
}

#[derive(Debug, Default)]
pub struct FixIndex {
    cell_m: f64,
    lat_cell: f64,
    lon_cell: f64,
    cells: HashMap<(i64, i64), Vec<Entry>>,
}

impl FixIndex {
    /// `cell_m` should be close to the query radius; larger radii are
    /// answered by widening the searched neighbourhood.
    pub fn build(tracks: &[Track], cell_m: f64) -> Self {
        let max_abs_lat = tracks
            .iter()
            .flat_map(|t| t.fixes.iter())
            .map(|f| f.pos.lat().abs())
            .fold(0.0f64, f64::max);
        let lat_cell = cell_m / METERS_PER_DEGREE * (1.0 + 1e-9);
        // one degree of latitude headroom covers query centers off the data
        let cos = (max_abs_lat + 1.0).min(90.0).to_radians().cos();
        let lon_cell = if cos > 1e-3 {
            lat_cell / cos * 1.01
        } else {
            360.0
        };

        let mut index = Self {
            cell_m,
            lat_cell,
            lon_cell,
            cells: HashMap::new(),
        };
        for (ti, tr) in tracks.iter().enumerate() {
            for f in &tr.fixes {
                index
                    .cells
                    .entry(index.key(f.pos))
                    .or_default()
                    .push(Entry {
                        t: f.t,
                        track: ti as u32,
                        pos: f.pos,
                    });
            }
        }
        for v in index.cells.values_mut() {
            v.sort_by_key(|e| (e.t, e.track));
        }
        index
    }

    fn key(&self, p: GeoPoint) -> (i64, i64) {
        (
            (p.lat() / self.lat_cell).floor() as i64,
            (p.lon() / self.lon_cell).floor() as i64,
        )
    }

    /// Indices of tracks with a fix within `radius_m` of `center` during
    /// the closed interval `window`.
    pub fn vessels_near(
        &self,
        center: GeoPoint,
        radius_m: f64,
        (lo, hi): (Timestamp, Timestamp),
    ) -> BTreeSet<usize> {
        let rings = (radius_m / self.cell_m).ceil().max(1.0) as i64;
        let (cy, cx) = self.key(center);
        let mut found = BTreeSet::new();
        for dy in -rings..=rings {
            for dx in -rings..=rings {
                let Some(cell) = self.cells.get(&(cy + dy, cx + dx)) else {
                    continue;
                };
                let a = cell.partition_point(|e| e.t < lo);
                for e in cell[a..].iter().take_while(|e| e.t <= hi) {
                    if !found.contains(&(e.track as usize))
                        && haversine_distance(e.pos, center) <= radius_m
                    {
                        found.insert(e.track as usize);
                    }
                }
            }
        }
        found
    }
}
