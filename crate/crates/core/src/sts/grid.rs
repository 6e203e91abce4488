//! Per-slice uniform grid over slow vessels.
//!
//! Cells are `max_distance` tall in latitude and at least `max_distance`
//! wide in longitude at the slice's highest latitude, so any pair within
//! `max_distance` sits in the same or an adjacent cell. Pairs straddling
//! the antimeridian are not indexed.

use super::{midpoint, GridSample, StsParams};
use crate::exec::Exec;
use crate::geo::{haversine_distance, GeoPoint, METERS_PER_DEGREE};

#[derive(Debug, Clone, Copy)]
pub(super) struct Entry {
    pub vessel: u32,
    pub pos: GeoPoint,
}

/// Slow-vessel samples grouped by grid instant.
pub(super) struct SliceTable {
    pub first_t: i64,
    pub step: i64,
    pub slices: Vec<Vec<Entry>>,
}

impl SliceTable {
    pub fn build(resampled: &[Vec<GridSample>], params: &StsParams) -> Self {
        let step = params.resample_step_s;
        let bounds = resampled
            .iter()
            .filter_map(|s| Some((s.first()?.t.unix(), s.last()?.t.unix())))
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)));
        let Some((first_t, last_t)) = bounds else {
            return Self {
                first_t: 0,
                step,
                slices: Vec::new(),
            };
        };
        let n = ((last_t - first_t) / step + 1) as usize;
        let mut counts = vec![0usize; n];
        for s in resampled
            .iter()
            .flatten()
            .filter(|s| s.sog < params.max_sog_kn)
        {
            counts[((s.t.unix() - first_t) / step) as usize] += 1;
        }
        let mut slices: Vec<Vec<Entry>> = counts.into_iter().map(Vec::with_capacity).collect();
        for (vessel, samples) in resampled.iter().enumerate() {
            for s in samples {
                if s.sog < params.max_sog_kn {
                    let k = ((s.t.unix() - first_t) / step) as usize;
                    slices[k].push(Entry {
                        vessel: vessel as u32,
                        pos: s.pos,
                    });
                }
            }
        }
        Self {
            first_t,
            step,
            slices,
        }
    }
}

/// One together-instant of a pair; `a < b` in canonical vessel order.
#[derive(Debug, Clone, Copy)]
pub(super) struct Hit {
    pub a: u32,
    pub b: u32,
    pub t: i64,
    pub mid: (f64, f64),
    pub sep: f64,
}

const SLICES_PER_TASK: usize = 32;

/// All together-instants, sorted by pair and, within a pair, by time.
pub(super) fn together_hits(table: &SliceTable, params: &StsParams, exec: Exec) -> Vec<Hit> {
    let indexed: Vec<(usize, &Vec<Entry>)> = table.slices.iter().enumerate().collect();
    let per_chunk = exec.map_chunks(&indexed, SLICES_PER_TASK, |chunk| {
        let mut pass = SlicePass::default();
        for (k, entries) in chunk {
            let t = table.first_t + *k as i64 * table.step;
            pass.run(entries, t, params.max_distance_m);
        }
        pass.hits
    });
    let mut hits: Vec<Hit> = per_chunk.into_iter().flatten().collect();
    // stable: time order survives inside each pair
    hits.sort_by_key(|h| (h.a, h.b));
    hits
}

struct Keyed {
    key: u64,
    entry: Entry,
}

/// Packs a cell coordinate so that `u64` order is `(row, col)` order.
#[inline]
fn pack(row: i64, col: i64) -> u64 {
    (((row + (1 << 31)) as u64) << 32) | ((col + (1 << 31)) as u64 & 0xffff_ffff)
}

#[inline]
fn floor_i64(x: f64) -> i64 {
    let i = x as i64;
    if (i as f64) > x {
        i - 1
    } else {
        i
    }
}

/// Scratch buffers reused across slices.
#[derive(Default)]
struct SlicePass {
    keyed: Vec<Keyed>,
    cells: Vec<(u64, usize, usize)>,
    hits: Vec<Hit>,
}

impl SlicePass {
    fn run(&mut self, entries: &[Entry], t: i64, max_distance: f64) {
        if entries.len() < 2 {
            return;
        }
        let lat_cell = max_distance / METERS_PER_DEGREE * (1.0 + 1e-9);
        let max_abs_lat = entries
            .iter()
            .map(|e| e.pos.lat().abs())
            .fold(0.0f64, f64::max);
        let cos = (max_abs_lat + lat_cell).min(90.0).to_radians().cos();
        // small-angle bound on the longitude span of a max_distance chord, with margin
        let lon_cell = if cos > 1e-3 {
            lat_cell / cos * 1.01
        } else {
            360.0
        };
        let (inv_lat, inv_lon) = (1.0 / lat_cell, 1.0 / lon_cell);

        let keyed = &mut self.keyed;
        keyed.clear();
        keyed.extend(entries.iter().map(|e| Keyed {
            key: pack(
                floor_i64(e.pos.lat() * inv_lat),
                floor_i64(e.pos.lon() * inv_lon),
            ),
            entry: *e,
        }));
        keyed.sort_unstable_by_key(|k| k.key);

        let cells = &mut self.cells;
        cells.clear();
        let mut s = 0;
        for i in 1..=keyed.len() {
            if i == keyed.len() || keyed[i].key != keyed[s].key {
                cells.push((keyed[s].key, s, i));
                s = i;
            }
        }

        // each cell looks forward at (row, col+1) and the three cells of
        // row+1, so every neighbouring cell pair is visited once
        let hits = &mut self.hits;
        let (mut right, mut below) = (0, 0);
        for (ci, &(key, s, e)) in cells.iter().enumerate() {
            for i in s..e {
                for j in i + 1..e {
                    push_hit(hits, &keyed[i].entry, &keyed[j].entry, t, max_distance);
                }
            }
            let next = key + 1;
            right = right.max(ci + 1);
            while right < cells.len() && cells[right].0 < next {
                right += 1;
            }
            if right < cells.len() && cells[right].0 == next {
                let (_, rs, re) = cells[right];
                cross(hits, &keyed[s..e], &keyed[rs..re], t, max_distance);
            }
            let (lo, hi) = (key + (1 << 32) - 1, key + (1 << 32) + 1);
            while below < cells.len() && cells[below].0 < lo {
                below += 1;
            }
            let mut b = below;
            while b < cells.len() && cells[b].0 <= hi {
                let (_, bs, be) = cells[b];
                cross(hits, &keyed[s..e], &keyed[bs..be], t, max_distance);
                b += 1;
            }
        }
    }
}

fn cross(hits: &mut Vec<Hit>, xs: &[Keyed], ys: &[Keyed], t: i64, max_distance: f64) {
    for x in xs {
        for y in ys {
            push_hit(hits, &x.entry, &y.entry, t, max_distance);
        }
    }
}

fn push_hit(hits: &mut Vec<Hit>, p: &Entry, q: &Entry, t: i64, max_distance: f64) {
    let (p, q) = if p.vessel < q.vessel { (p, q) } else { (q, p) };
    let sep = haversine_distance(p.pos, q.pos);
    if sep <= max_distance {
        hits.push(Hit {
            a: p.vessel,
            b: q.vessel,
            t,
            mid: midpoint(p.pos, q.pos),
            sep,
        });
    }
}
