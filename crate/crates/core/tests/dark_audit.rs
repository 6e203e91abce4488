use std::collections::BTreeSet;

use darksts::ais::{build_tracks, PositionFix, Track, VesselId};
use darksts::classify::TileLabel;
use darksts::dark::{audit_detection, scan_with, AuditParams, BBox, DarkAuditor, Detection};
use darksts::scene::{
    read_tiles_manifest, tile_scenes, write_tiles_manifest, TileParams, DEFAULT_CLOUD_THRESHOLD,
};
use darksts::sts::{detect_sts, StsParams};
use darksts::synth::{generate_scenario, SynthConfig};
use darksts::{Exec, GeoPoint, Timestamp};
use proptest::prelude::*;

const T0: i64 = 1_690_848_000;
const CENTER: (f64, f64) = (45.25, 36.5);

fn great_circle(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (p1, p2) = (a.0.to_radians(), b.0.to_radians());
    let dp = p2 - p1;
    let dl = (b.1 - a.1).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * 6_371_008.8 * h.sqrt().asin()
}

fn detection(lat: f64, lon: f64, at: i64) -> Detection {
    Detection {
        scene_id: "S".into(),
        label: TileLabel::StsTanker,
        bbox: BBox {
            x0: 0.0,
            y0: 0.0,
            w: 10.0,
            h: 10.0,
        },
        confidence: 0.9,
        geo_center: GeoPoint::new(lat, lon).unwrap(),
        acquired_at: Timestamp(at),
        resolution_m: 3.0,
    }
}

type RawFix = (u8, i64, f64, f64);

fn arb_fixes() -> impl Strategy<Value = Vec<RawFix>> {
    prop::collection::vec(
        (
            0u8..12,
            -100_000i64..100_000,
            -0.02f64..0.02,
            -0.03f64..0.03,
        ),
        0..200,
    )
}

fn tracks_of(raw: &[RawFix]) -> Vec<Track> {
    let fixes: Vec<PositionFix> = raw
        .iter()
        .map(|&(v, dt, dlat, dlon)| {
            let pos = GeoPoint::new(CENTER.0 + dlat, CENTER.1 + dlon).unwrap();
            PositionFix::new(
                VesselId::new(format!("V{v:02}")),
                Timestamp(T0 + dt),
                pos,
                0.0,
                None,
            )
            .unwrap()
        })
        .collect();
    build_tracks(&fixes, &[])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn indexed_audit_matches_direct_count(
        raw in arb_fixes(),
        radius in 100.0f64..3_000.0,
        window in 600i64..60_000,
        min_ids in 1usize..4,
        (dlat, dlon, dt) in (-0.01f64..0.01, -0.01f64..0.01, -20_000i64..20_000),
    ) {
        let tracks = tracks_of(&raw);
        let d = detection(CENTER.0 + dlat, CENTER.1 + dlon, T0 + dt);
        let params = AuditParams { radius_m: radius, window_s: window, min_identities: min_ids };
        let c = (d.geo_center.lat(), d.geo_center.lon());

        let mut expected = BTreeSet::new();
        for tr in &tracks {
            for f in &tr.fixes {
                let dist = great_circle(c, (f.pos.lat(), f.pos.lon()));
                prop_assume!((dist - radius).abs() > 1e-3);
                if (f.t.0 - d.acquired_at.0).abs() <= window && dist <= radius {
                    expected.insert(tr.id().clone());
                }
            }
        }

        let direct = audit_detection(&d, &tracks, &params).unwrap();
        let indexed = DarkAuditor::new(&tracks, params).audit(&d).unwrap();
        prop_assert_eq!(&direct, &indexed);
        prop_assert_eq!(&indexed.distinct_identities, &expected);
        prop_assert_eq!(indexed.is_dark, expected.len() < min_ids);
    }

    #[test]
    fn wider_radius_never_adds_dark_verdicts(raw in arb_fixes(), r in 100.0f64..2_000.0, k in 1.0f64..4.0) {
        let tracks = tracks_of(&raw);
        let dets: Vec<Detection> = (0..5).map(|i| detection(CENTER.0 + 0.004 * f64::from(i) - 0.008, CENTER.1, T0)).collect();
        let small = AuditParams { radius_m: r, ..Default::default() };
        let large = AuditParams { radius_m: r * k, ..Default::default() };
        let a = scan_with(&dets, &tracks, &small, Exec::Sequential);
        let b = scan_with(&dets, &tracks, &large, Exec::Sequential);
        prop_assert!(b.dark_count <= a.dark_count);
        for (x, y) in a.verdicts.iter().zip(&b.verdicts) {
            prop_assert!(x.distinct_identities.is_subset(&y.distinct_identities));
        }
    }
}

#[test]
fn non_transfer_detection_is_refused() {
    let mut d = detection(CENTER.0, CENTER.1, T0);
    d.label = TileLabel::Tanker;
    assert!(audit_detection(&d, &[], &AuditParams::default()).is_err());
}

#[test]
fn exec_modes_agree_on_a_scenario() {
    let cfg = SynthConfig {
        vessels: 24,
        sts_events: 8,
        dark_fraction: 0.5,
        ..Default::default()
    };
    let s = generate_scenario(5, &cfg).unwrap();
    let tracks = build_tracks(&s.fixes, &s.registry);
    let events = detect_sts(&tracks, &StsParams::default());
    let tiles = |e| {
        tile_scenes(
            &s.scenes,
            &tracks,
            &events,
            &TileParams::default(),
            DEFAULT_CLOUD_THRESHOLD,
            e,
        )
    };
    assert_eq!(tiles(Exec::Sequential), tiles(Exec::Parallel));
    let scan = |e| scan_with(&s.detections, &tracks, &AuditParams::default(), e);
    assert_eq!(scan(Exec::Sequential), scan(Exec::Parallel));
}

#[test]
fn tiles_manifest_round_trip() {
    let s = generate_scenario(6, &SynthConfig::default()).unwrap();
    let tracks = build_tracks(&s.fixes, &s.registry);
    let events = detect_sts(&tracks, &StsParams::default());
    let params = TileParams::default();
    let tiles = tile_scenes(
        &s.scenes,
        &tracks,
        &events,
        &params,
        DEFAULT_CLOUD_THRESHOLD,
        Exec::Sequential,
    );
    assert_eq!(
        tiles.len(),
        s.expected_tile_census().values().sum::<usize>()
    );
    let mut buf = Vec::new();
    write_tiles_manifest(&mut buf, &tiles).unwrap();
    let back = read_tiles_manifest(buf.as_slice(), 2.0 * params.buffer_m).unwrap();
    assert_eq!(back.len(), tiles.len());
    for (a, b) in back.iter().zip(&tiles) {
        assert_eq!(
            (
                &a.scene_id,
                a.label,
                a.window,
                &a.vessels,
                a.ais_time_delta_s
            ),
            (
                &b.scene_id,
                b.label,
                b.window,
                &b.vessels,
                b.ais_time_delta_s
            )
        );
        assert!(
            great_circle(
                (a.center.lat(), a.center.lon()),
                (b.center.lat(), b.center.lon())
            ) < 1e-6
        );
    }
}
