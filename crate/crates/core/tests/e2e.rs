use darksts::ais::build_tracks;
use darksts::dark::AuditParams;
use darksts::pipeline::{run_e2e, E2eConfig};
use darksts::sts::StsParams;
use darksts::sts::{brute_force_sts, detect_sts};
use darksts::synth::{generate_scenario, SynthConfig};

#[test]
fn seed_7_recovers_five_events() {
    let cfg = SynthConfig {
        vessels: 20,
        sts_events: 5,
        ..Default::default()
    };
    let s = generate_scenario(7, &cfg).unwrap();
    let tracks = build_tracks(&s.fixes, &s.registry);
    let params = StsParams::default();
    let events = detect_sts(&tracks, &params);
    assert_eq!(events, brute_force_sts(&tracks, &params));
    assert_eq!(events.len(), 5);
}

#[test]
fn four_of_ten_dark() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_e2e(7, &E2eConfig::default(), dir.path(), None).unwrap();
    assert!(out.passed(), "{:#?}", out.mismatches);
    assert_eq!(out.report.dark_count, 4);
    assert_eq!(out.planted_dark, 4);
}

#[test]
fn day_long_window_keeps_dark_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = E2eConfig {
        audit: AuditParams {
            window_s: 24 * 3_600,
            ..Default::default()
        },
        ..Default::default()
    };
    let out = run_e2e(21, &cfg, dir.path(), None).unwrap();
    assert!(out.passed(), "{:#?}", out.mismatches);
}
