use std::collections::{BTreeMap, HashMap};

use super::{PositionFix, VesselId, VesselRecord};

/// Time-ordered fixes of one vessel, joined with its registry entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub vessel: VesselRecord,
    /// False when the vessel was absent from the registry and `vessel` is a
    /// stand-in from [`VesselRecord::unregistered`].
    pub registered: bool,
    /// Strictly increasing in `t`.
    pub fixes: Vec<PositionFix>,
}

impl Track {
    pub fn id(&self) -> &VesselId {
        &self.vessel.vessel_id
    }
}

/// Groups fixes by vessel, sorts them by time and keeps the first fix seen
/// for each `(vessel_id, t)`. Tracks come back ordered by vessel id.
pub fn build_tracks(fixes: &[PositionFix], registry: &[VesselRecord]) -> Vec<Track> {
    let lookup: HashMap<&VesselId, &VesselRecord> =
        registry.iter().map(|r| (&r.vessel_id, r)).collect();

    let mut groups: BTreeMap<&VesselId, Vec<&PositionFix>> = BTreeMap::new();
    for f in fixes {
        groups.entry(&f.vessel_id).or_default().push(f);
    }

    groups
        .into_iter()
        .map(|(id, mut group)| {
            // stable: among equal timestamps the earliest input row stays first
            group.sort_by_key(|f| f.t);
            group.dedup_by_key(|f| f.t);
            let (vessel, registered) = match lookup.get(id) {
                Some(r) => ((*r).clone(), true),
                None => (VesselRecord::unregistered(id.clone()), false),
            };
            Track {
                vessel,
                registered,
                fixes: group.into_iter().cloned().collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ais::CargoFamily;
    use crate::geo::GeoPoint;
    use crate::time::Timestamp;
    use proptest::prelude::*;

    fn fix(id: &str, t: i64, lat: f64) -> PositionFix {
        PositionFix::new(
            VesselId::new(id),
            Timestamp(t),
            GeoPoint::new(lat, 36.0).unwrap(),
            0.5,
            None,
        )
        .unwrap()
    }

    fn record(id: &str) -> VesselRecord {
        VesselRecord {
            vessel_id: VesselId::new(id),
            imo: None,
            name: id.to_uppercase(),
            length_m: 100.0,
            beam_m: 15.0,
            dwt: 5_000.0,
            cargo_family: CargoFamily::Dry,
        }
    }

    #[test]
    fn groups_and_sorts() {
        let mut fixes = Vec::new();
        for t in (0..10).rev() {
            fixes.push(fix("b", t * 60, 45.0));
            fixes.push(fix("a", t * 60, 45.1));
        }
        let tracks = build_tracks(&fixes, &[record("a"), record("b")]);
        assert_eq!(tracks.len(), 2);
        assert_eq!(tracks[0].id().as_str(), "a");
        for tr in &tracks {
            assert_eq!(tr.fixes.len(), 10);
            assert!(tr.registered);
            assert!(tr.fixes.windows(2).all(|w| w[0].t < w[1].t));
        }
    }

    #[test]
    fn keeps_first_duplicate() {
        let fixes = vec![fix("a", 60, 45.0), fix("a", 60, 45.5), fix("a", 0, 45.2)];
        let tracks = build_tracks(&fixes, &[]);
        assert_eq!(tracks[0].fixes.len(), 2);
        assert_eq!(tracks[0].fixes[1].pos.lat(), 45.0);
    }

    #[test]
    fn unknown_vessel_flagged() {
        let tracks = build_tracks(&[fix("ghost", 0, 45.0)], &[record("a")]);
        assert_eq!(tracks.len(), 1);
        assert!(!tracks[0].registered);
        assert_eq!(tracks[0].vessel.cargo_family, CargoFamily::Other);
        assert_eq!(tracks[0].vessel.dwt, 0.0);
    }

    proptest! {
        #[test]
        fn permutation_invariant(
            rows in proptest::collection::vec((0u8..5, 0i64..50), 0..60),
            seed in any::<u64>(),
        ) {
            // one fix per (vessel, t) so "first duplicate" is order-free
            let mut seen = std::collections::HashSet::new();
            let fixes: Vec<PositionFix> = rows
                .into_iter()
                .filter(|k| seen.insert(*k))
                .map(|(v, t)| fix(&format!("v{v}"), t * 30, 45.0 + f64::from(v) * 0.01 + t as f64 * 1e-4))
                .collect();
            let mut shuffled = fixes.clone();
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let reg = [record("v1"), record("v3")];
            prop_assert_eq!(build_tracks(&fixes, &reg), build_tracks(&shuffled, &reg));
        }
    }
}
