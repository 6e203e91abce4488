//! Unindexed reference detector: every pair, every instant.

use super::{
    canonical_order, make_event, midpoint, resample_track, sort_events, RunBuilder, StsEvent,
    StsParams,
};
use crate::ais::Track;
use crate::geo::haversine_distance;

pub fn brute_force_sts(tracks: &[Track], params: &StsParams) -> Vec<StsEvent> {
    let order = canonical_order(tracks);
    let sorted: Vec<&Track> = order.iter().map(|&i| &tracks[i]).collect();
    let resampled: Vec<_> = sorted
        .iter()
        .map(|t| resample_track(t, params.resample_step_s, params.max_gap_s))
        .collect();

    let mut events = Vec::new();
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            let (sa, sb) = (&resampled[i], &resampled[j]);
            let mut builder = RunBuilder::new(params);
            let (mut x, mut y) = (0, 0);
            while x < sa.len() && y < sb.len() {
                let (p, q) = (&sa[x], &sb[y]);
                if p.t < q.t {
                    x += 1;
                    continue;
                }
                if q.t < p.t {
                    y += 1;
                    continue;
                }
                if p.sog < params.max_sog_kn && q.sog < params.max_sog_kn {
                    let sep = haversine_distance(p.pos, q.pos);
                    if sep <= params.max_distance_m {
                        if let Some(run) = builder.push(p.t.unix(), midpoint(p.pos, q.pos), sep) {
                            events.push(make_event(sorted[i], sorted[j], run));
                        }
                    }
                }
                x += 1;
                y += 1;
            }
            if let Some(run) = builder.take() {
                events.push(make_event(sorted[i], sorted[j], run));
            }
        }
    }
    sort_events(&mut events);
    events
}
