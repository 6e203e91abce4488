//! Deterministic synthetic scenarios with planted transfers.
//!
//! The only randomness source is ChaCha8 seeded from the scenario seed, so
//! a `(seed, config)` pair regenerates the same bytes on every platform.
//!
//! Layout: every planted event and every anchored background vessel gets
//! its own slot on a jittered lattice with [`SLOT_SPACING_M`] spacing.
//! Transiting vessels run east-west on lanes south of the lattice. An
//! event slot holds the giver (anchored at the slot center), the receiver
//! (waiting [`WAIT_OFFSET_M`] away, then moving alongside for the planted
//! interval) and, when the fleet allows, one anchored bystander on the
//! far side. One scene is acquired per event at the middle of its
//! interval.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::ais::{CargoFamily, PositionFix, VesselId, VesselRecord};
use crate::classify::{classify_dwt, classify_sts, ShipClass, StsClass, TileLabel};
use crate::dark::{BBox, Detection};
use crate::geo::{offset_to_geo, GeoPoint, LocalOffset};
use crate::scene::SceneMeta;
use crate::sts::{StsEvent, StsParams};
use crate::time::Timestamp;

mod export;

pub use export::{export_scenario, ExportError, TRUTH_COLUMNS};

pub const SLOT_SPACING_M: f64 = 6_000.0;
pub const WAIT_OFFSET_M: f64 = 1_200.0;
pub const BYSTANDER_OFFSET_M: f64 = 1_300.0;
/// Side of the square scene cut around each event.
pub const SCENE_EXTENT_M: f64 = 4_000.0;
/// Extra suppression on each side of a dark event, beyond any audit window
/// up to ±24 h.
pub const DARK_MARGIN_S: i64 = 25 * 3_600;

const KNOT_MS: f64 = 1_852.0 / 3_600.0;
const APPROACH_KN: f64 = 4.0;
const SLOT_JITTER_M: f64 = 200.0;
const ANCHOR_DRIFT_M: f64 = 150.0;
const LANE_SPACING_M: f64 = 1_500.0;
const TRANSIT_FRACTION: f64 = 0.25;

// Single-vessel tile counts per class, used as sampling weights.
const CLASS_WEIGHTS: [(ShipClass, f64); 4] = [
    (ShipClass::GeneralCargo, 11_995.0),
    (ShipClass::BulkCarrier, 1_946.0),
    (ShipClass::Tanker, 3_303.0),
    (ShipClass::Vlcc, 261.0),
];
const STS_CARGO_WEIGHT: f64 = 2_081.0;
const STS_TANKER_WEIGHT: f64 = 637.0;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid scenario config: {0}")]
pub struct ConfigInvalid(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub vessels: usize,
    pub duration_s: i64,
    pub sts_events: usize,
    /// Share of planted events whose AIS is suppressed for one vessel.
    pub dark_fraction: f64,
    pub center: GeoPoint,
    pub start: Timestamp,
    /// Seconds between consecutive fixes of one vessel.
    pub report_interval_s: i64,
    pub resolution_m: f64,
    /// Thresholds the planted events are sized against.
    pub sts: StsParams,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            vessels: 20,
            duration_s: 48 * 3_600,
            sts_events: 5,
            dark_fraction: 0.0,
            center: GeoPoint::new(45.25, 36.5).expect("valid default center"),
            start: Timestamp(1_690_848_000),
            report_interval_s: 300,
            resolution_m: 3.0,
            sts: StsParams::default(),
        }
    }
}

impl SynthConfig {
    fn lead_s(&self) -> i64 {
        let transit =
            ((WAIT_OFFSET_M + self.sts.max_distance_m) / (APPROACH_KN * KNOT_MS)).ceil() as i64;
        transit + 2 * self.report_interval_s + self.sts.resample_step_s
    }

    fn max_stay_s(&self) -> i64 {
        3 * self.sts.min_duration_s + self.stay_pad_s()
    }

    /// Added to the drawn duration so the detectable part keeps its slack
    /// after arrival and departure interpolation.
    fn stay_pad_s(&self) -> i64 {
        2 * (self.report_interval_s + self.sts.resample_step_s)
    }

    pub fn validate(&self) -> Result<(), ConfigInvalid> {
        let bad = |m: String| Err(ConfigInvalid(m));
        if self.vessels == 0 {
            return bad("vessel count must be positive".into());
        }
        if self.vessels < 2 * self.sts_events {
            return bad(format!(
                "{} events need at least {} vessels, got {}",
                self.sts_events,
                2 * self.sts_events,
                self.vessels
            ));
        }
        if !(0.0..=1.0).contains(&self.dark_fraction) {
            return bad(format!(
                "dark fraction {} outside [0, 1]",
                self.dark_fraction
            ));
        }
        if self.report_interval_s <= 0 || self.report_interval_s > self.sts.max_gap_s {
            return bad(format!(
                "report interval {} s outside (0, {}]",
                self.report_interval_s, self.sts.max_gap_s
            ));
        }
        if !(self.resolution_m > 0.0 && self.resolution_m.is_finite()) {
            return bad("resolution must be positive".into());
        }
        let needed = self.max_stay_s() + 2 * self.lead_s();
        if self.sts_events > 0 && self.duration_s < needed {
            return bad(format!(
                "duration {} s shorter than {needed} s needed per event",
                self.duration_s
            ));
        }
        if self.duration_s <= 0 {
            return bad("duration must be positive".into());
        }
        self.sts
            .validate()
            .map_err(|e| ConfigInvalid(e.to_string()))
    }
}

/// One planted transfer with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedEvent {
    /// Interval is the planted stationary interval.
    pub event: StsEvent,
    pub dark: bool,
    /// The vessel whose AIS was removed around a dark event.
    pub suppressed: Option<VesselId>,
    pub scene_id: String,
    pub bystander: Option<VesselId>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scenario {
    pub seed: u64,
    pub registry: Vec<VesselRecord>,
    /// Grouped by vessel, time-ordered.
    pub fixes: Vec<PositionFix>,
    pub scenes: Vec<SceneMeta>,
    pub truth: Vec<PlantedEvent>,
    pub detections: Vec<Detection>,
}

impl Scenario {
    pub fn truth_sts(&self) -> Vec<&StsEvent> {
        self.truth.iter().map(|p| &p.event).collect()
    }

    pub fn truth_dark(&self) -> Vec<&PlantedEvent> {
        self.truth.iter().filter(|p| p.dark).collect()
    }

    pub fn dark_count(&self) -> usize {
        self.truth.iter().filter(|p| p.dark).count()
    }

    fn class_of(&self, id: &VesselId) -> ShipClass {
        self.registry
            .iter()
            .find(|r| &r.vessel_id == id)
            .map(|r| classify_dwt(r.cargo_family, r.dwt))
            .unwrap_or(ShipClass::Unknown)
    }

    /// Tile labels the manifest should contain. A visible transfer gives
    /// one transfer tile; around a dark one the vessel still reporting
    /// gets a single-vessel tile. Bystanders always get their own.
    pub fn expected_tile_census(&self) -> BTreeMap<TileLabel, usize> {
        let mut census = BTreeMap::new();
        let mut add = |label: Option<TileLabel>| {
            if let Some(l) = label {
                *census.entry(l).or_insert(0) += 1;
            }
        };
        for p in &self.truth {
            match &p.suppressed {
                None => add(p.event.sts_class.tile_label()),
                Some(gone) => {
                    let kept = if gone == &p.event.vessel_a {
                        &p.event.vessel_b
                    } else {
                        &p.event.vessel_a
                    };
                    add(self.class_of(kept).tile_label());
                }
            }
            if let Some(b) = &p.bystander {
                add(self.class_of(b).tile_label());
            }
        }
        census
    }
}

/// Position and reported speed over time.
#[derive(Debug, Clone)]
enum Motion {
    Anchored {
        center: GeoPoint,
    },
    Transit {
        west: GeoPoint,
        span_m: f64,
        speed_ms: f64,
        phase_m: f64,
    },
    Receiver {
        wait: LocalOffset,
        meet: LocalOffset,
        slot: GeoPoint,
        arrive: i64,
        depart: i64,
        transit_s: i64,
    },
}

struct Vessel {
    record: VesselRecord,
    motion: Motion,
    base_draught: f64,
    /// (start, end, total change) applied linearly over the interval.
    draught_change: Option<(i64, i64, f64)>,
    phase_s: i64,
}

/// Builds a scenario. See the module docs for the layout.
pub fn generate_scenario(seed: u64, config: &SynthConfig) -> Result<Scenario, ConfigInvalid> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_events = config.sts_events;
    let n_background = config.vessels - 2 * n_events;
    let n_transit = if n_background > 1 {
        ((n_background as f64 * TRANSIT_FRACTION).round() as usize).min(n_background - 1)
    } else {
        0
    };
    let n_anchored = n_background - n_transit;
    let n_bystanders = n_anchored.min(n_events);
    let n_slots = n_events + n_anchored - n_bystanders;

    let cols = (n_slots as f64).sqrt().ceil().max(1.0) as usize;
    let rows = n_slots.div_ceil(cols).max(1);
    let slot_center = |k: usize, rng: &mut ChaCha8Rng| -> GeoPoint {
        let (r, c) = (k / cols, k % cols);
        let east = (c as f64 - (cols as f64 - 1.0) / 2.0) * SLOT_SPACING_M
            + rng.random_range(-SLOT_JITTER_M..SLOT_JITTER_M);
        let north = ((rows as f64 - 1.0) / 2.0 - r as f64) * SLOT_SPACING_M
            + rng.random_range(-SLOT_JITTER_M..SLOT_JITTER_M);
        offset_to_geo(LocalOffset::new(east, north), config.center)
            .expect("lattice stays on the globe")
    };
    let slots: Vec<GeoPoint> = (0..n_slots).map(|k| slot_center(k, &mut rng)).collect();

    let mut next_id = 0usize;
    let mut new_record = |class: ShipClass, rng: &mut ChaCha8Rng| -> VesselRecord {
        let i = next_id;
        next_id += 1;
        make_record(i, class, rng)
    };

    let t0 = config.start.unix();
    let lead = config.lead_s();
    let mut vessels: Vec<Vessel> = Vec::with_capacity(config.vessels);
    let mut planted: Vec<(usize, usize, i64, i64, StsClass, f64)> = Vec::new();

    let min_dur = config.sts.min_duration_s as f64;
    let max_sep = 0.8 * config.sts.max_distance_m;
    let bearings: Vec<f64> = (0..n_events)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();

    for (k, &theta) in bearings.iter().enumerate() {
        let slot = slots[k];
        let pair_family =
            if rng.random_range(0.0..STS_CARGO_WEIGHT + STS_TANKER_WEIGHT) < STS_CARGO_WEIGHT {
                CargoFamily::Dry
            } else {
                CargoFamily::Liquid
            };
        let giver = new_record(draw_in_family(pair_family, &mut rng), &mut rng);
        let receiver = new_record(draw_in_family(pair_family, &mut rng), &mut rng);
        let sts_class = classify_sts(
            classify_dwt(giver.cargo_family, giver.dwt),
            classify_dwt(receiver.cargo_family, receiver.dwt),
        );

        let stay =
            rng.random_range(1.1 * min_dur..3.0 * min_dur).round() as i64 + config.stay_pad_s();
        let latest = t0 + config.duration_s - lead - stay;
        let arrive = rng.random_range(t0 + lead..=latest.max(t0 + lead));
        let depart = arrive + stay;
        let sep = rng.random_range(50.0..max_sep);
        let meet_bearing = theta + rng.random_range(-1.0..1.0);
        let wait = polar(WAIT_OFFSET_M, theta);
        let meet = polar(sep, meet_bearing);
        let transit_s = ((wait.east - meet.east).hypot(wait.north - meet.north)
            / (APPROACH_KN * KNOT_MS))
            .ceil() as i64;

        let delta = (rng.random_range(0.4..1.2f64) * 10.0).round() / 10.0;
        let gi = vessels.len();
        vessels.push(Vessel {
            base_draught: base_draught(&giver),
            record: giver,
            motion: Motion::Anchored { center: slot },
            draught_change: Some((arrive, depart, -delta)),
            phase_s: 0,
        });
        vessels.push(Vessel {
            base_draught: base_draught(&receiver),
            record: receiver,
            motion: Motion::Receiver {
                wait,
                meet,
                slot,
                arrive,
                depart,
                transit_s,
            },
            draught_change: Some((arrive, depart, delta)),
            phase_s: 0,
        });
        planted.push((gi, gi + 1, arrive, depart, sts_class, sep));
    }

    let mut bystander_of: Vec<Option<usize>> = vec![None; n_events];
    for i in 0..n_anchored {
        let record = new_record(draw_weighted(&mut rng), &mut rng);
        let center = if i < n_bystanders {
            bystander_of[i] = Some(vessels.len());
            let p = polar(BYSTANDER_OFFSET_M, bearings[i] + std::f64::consts::PI);
            offset_to_geo(p, slots[i]).expect("bystander stays on the globe")
        } else {
            slots[n_events + i - n_bystanders]
        };
        vessels.push(Vessel {
            base_draught: base_draught(&record),
            record,
            motion: Motion::Anchored { center },
            draught_change: None,
            phase_s: 0,
        });
    }

    let lattice_w = cols as f64 * SLOT_SPACING_M;
    let south_edge = -(rows as f64 / 2.0) * SLOT_SPACING_M - SLOT_SPACING_M;
    for j in 0..n_transit {
        let record = new_record(draw_weighted(&mut rng), &mut rng);
        let west_off = LocalOffset::new(-lattice_w / 2.0, south_edge - j as f64 * LANE_SPACING_M);
        let span_m = lattice_w.max(SLOT_SPACING_M);
        vessels.push(Vessel {
            base_draught: base_draught(&record),
            record,
            motion: Motion::Transit {
                west: offset_to_geo(west_off, config.center).expect("lane stays on the globe"),
                span_m,
                speed_ms: rng.random_range(6.0..12.0) * KNOT_MS,
                phase_m: rng.random_range(0.0..2.0 * span_m),
            },
            draught_change: None,
            phase_s: 0,
        });
    }

    for v in &mut vessels {
        v.phase_s = rng.random_range(0..config.report_interval_s);
    }

    // dark selection
    let n_dark = (config.dark_fraction * n_events as f64).round() as usize;
    let mut order: Vec<usize> = (0..n_events).collect();
    order.shuffle(&mut rng);
    let mut suppressed: Vec<Option<usize>> = vec![None; n_events];
    for &k in order.iter().take(n_dark) {
        let (a, b, ..) = planted[k];
        suppressed[k] = Some(if rng.random_bool(0.5) { a } else { b });
    }

    let jitter = Normal::new(0.0, 3.0).expect("valid sigma");
    let mut fixes = Vec::new();
    let mut positions_at: Vec<Vec<(i64, GeoPoint)>> = vec![Vec::new(); vessels.len()];
    let acquisitions: Vec<i64> = planted.iter().map(|p| (p.2 + p.3) / 2).collect();
    let event_of_vessel: BTreeMap<usize, usize> = planted
        .iter()
        .enumerate()
        .flat_map(|(k, p)| [(p.0, k), (p.1, k)])
        .collect();

    for (vi, v) in vessels.iter().enumerate() {
        let hidden: Vec<(i64, i64)> = suppressed
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Some(vi))
            .map(|(k, _)| (planted[k].2 - DARK_MARGIN_S, planted[k].3 + DARK_MARGIN_S))
            .collect();
        let mut drift = LocalOffset::new(0.0, 0.0);
        let mut t = t0 + v.phase_s;
        let end = t0 + config.duration_s;
        while t < end {
            let (pos, sog) = match &v.motion {
                Motion::Anchored { center } => {
                    let held = event_of_vessel.contains_key(&vi);
                    let step = if held { 0.0 } else { 6.0 };
                    drift = LocalOffset::new(
                        (0.97 * drift.east + step * jitter.sample(&mut rng) / 3.0)
                            .clamp(-ANCHOR_DRIFT_M, ANCHOR_DRIFT_M),
                        (0.97 * drift.north + step * jitter.sample(&mut rng) / 3.0)
                            .clamp(-ANCHOR_DRIFT_M, ANCHOR_DRIFT_M),
                    );
                    let off = LocalOffset::new(
                        drift.east + jitter.sample(&mut rng),
                        drift.north + jitter.sample(&mut rng),
                    );
                    (offset_to_geo(off, *center), rng.random_range(0.0..0.45))
                }
                Motion::Transit {
                    west,
                    span_m,
                    speed_ms,
                    phase_m,
                } => {
                    let s = (phase_m + speed_ms * (t - t0) as f64).rem_euclid(2.0 * span_m);
                    let x = if s <= *span_m { s } else { 2.0 * span_m - s };
                    (
                        offset_to_geo(LocalOffset::new(x, 0.0), *west),
                        speed_ms / KNOT_MS,
                    )
                }
                Motion::Receiver {
                    wait,
                    meet,
                    slot,
                    arrive,
                    depart,
                    transit_s,
                } => {
                    let (off, moving) =
                        receiver_offset(t, *wait, *meet, *arrive, *depart, *transit_s);
                    let off = LocalOffset::new(
                        off.east + jitter.sample(&mut rng),
                        off.north + jitter.sample(&mut rng),
                    );
                    let sog = if moving {
                        APPROACH_KN
                    } else {
                        rng.random_range(0.05..0.45)
                    };
                    (offset_to_geo(off, *slot), sog)
                }
            };
            let pos = pos.expect("synthetic positions stay on the globe");
            if acquisitions
                .iter()
                .any(|&a| (t - a).abs() <= config.report_interval_s)
            {
                positions_at[vi].push((t, pos));
            }
            if !hidden.iter().any(|&(lo, hi)| lo <= t && t <= hi) {
                let draught = draught_at(v, t);
                let fix = PositionFix::new(
                    v.record.vessel_id.clone(),
                    Timestamp(t),
                    pos,
                    sog,
                    Some(draught),
                )
                .expect("synthetic fix within AIS ranges");
                fixes.push(fix);
            }
            t += config.report_interval_s;
        }
    }

    let mut scenes = Vec::with_capacity(n_events);
    let mut truth = Vec::with_capacity(n_events);
    let mut detections = Vec::new();
    let side_px = (SCENE_EXTENT_M / config.resolution_m).ceil() as u32;
    let half = f64::from(side_px) * config.resolution_m / 2.0;

    for (k, &(a, b, arrive, depart, sts_class, sep)) in planted.iter().enumerate() {
        let acq = acquisitions[k];
        let pa = interpolate(&positions_at[a], acq);
        let pb = interpolate(&positions_at[b], acq);
        let mid_true = GeoPoint::new((pa.lat() + pb.lat()) / 2.0, (pa.lon() + pb.lon()) / 2.0)
            .expect("midpoint of valid points");
        let origin = offset_to_geo(LocalOffset::new(-half, half), mid_true)
            .expect("scene origin on the globe");
        let scene_id = format!("SYN{seed:04}-{k:03}");
        let scene = SceneMeta::north_up(
            scene_id.clone(),
            Timestamp(acq),
            origin,
            side_px,
            side_px,
            config.resolution_m,
            (rng.random_range(0.0..0.6f64) * 100.0).round() / 100.0,
        )
        .expect("synthetic scene is valid");

        let (ra, rb) = (&vessels[a].record, &vessels[b].record);
        if let Some(label) = sts_class.tile_label() {
            let bbox = pair_bbox(&scene, pa, ra.length_m, pb, rb.length_m);
            detections.push(detection(&scene, label, bbox, rng.random_range(0.8..0.99)));
        }
        if let Some(bi) = bystander_of[k] {
            let rec = &vessels[bi].record;
            if let Some(label) = classify_dwt(rec.cargo_family, rec.dwt).tile_label() {
                let p = interpolate(&positions_at[bi], acq);
                let heading = rng.random_range(0.0..std::f64::consts::PI);
                let bbox = ship_bbox(&scene, p, rec.length_m, heading);
                detections.push(detection(&scene, label, bbox, rng.random_range(0.6..0.99)));
            }
        }

        let (mut va, mut vb) = (ra.vessel_id.clone(), rb.vessel_id.clone());
        if vb < va {
            std::mem::swap(&mut va, &mut vb);
        }
        truth.push(PlantedEvent {
            event: StsEvent {
                vessel_a: va,
                vessel_b: vb,
                start: Timestamp(arrive),
                end: Timestamp(depart),
                midpoint: mid_true,
                sts_class,
                mean_separation_m: sep,
            },
            dark: suppressed[k].is_some(),
            suppressed: suppressed[k].map(|i| vessels[i].record.vessel_id.clone()),
            scene_id,
            bystander: bystander_of[k].map(|i| vessels[i].record.vessel_id.clone()),
        });
        scenes.push(scene);
    }

    let mut registry: Vec<VesselRecord> = vessels.into_iter().map(|v| v.record).collect();
    registry.sort_by(|x, y| x.vessel_id.cmp(&y.vessel_id));
    fixes.sort_by(|x, y| x.vessel_id.cmp(&y.vessel_id).then(x.t.cmp(&y.t)));

    Ok(Scenario {
        seed,
        registry,
        fixes,
        scenes,
        truth,
        detections,
    })
}

fn polar(r: f64, bearing: f64) -> LocalOffset {
    LocalOffset::new(r * bearing.sin(), r * bearing.cos())
}

fn lerp(a: LocalOffset, b: LocalOffset, f: f64) -> LocalOffset {
    LocalOffset::new(
        a.east + (b.east - a.east) * f,
        a.north + (b.north - a.north) * f,
    )
}

/// Receiver position relative to its slot, and whether it is under way.
fn receiver_offset(
    t: i64,
    wait: LocalOffset,
    meet: LocalOffset,
    arrive: i64,
    depart: i64,
    transit_s: i64,
) -> (LocalOffset, bool) {
    if t < arrive - transit_s || t > depart + transit_s {
        (wait, false)
    } else if t < arrive {
        let f = (t - (arrive - transit_s)) as f64 / transit_s as f64;
        (lerp(wait, meet, f), true)
    } else if t <= depart {
        (meet, false)
    } else {
        let f = (t - depart) as f64 / transit_s as f64;
        (lerp(meet, wait, f), true)
    }
}

fn interpolate(samples: &[(i64, GeoPoint)], t: i64) -> GeoPoint {
    let i = samples.partition_point(|s| s.0 < t);
    match (i.checked_sub(1).map(|j| samples[j]), samples.get(i)) {
        (Some((t0, p0)), Some(&(t1, p1))) if t1 > t0 => {
            let f = (t - t0) as f64 / (t1 - t0) as f64;
            GeoPoint::new(
                p0.lat() + (p1.lat() - p0.lat()) * f,
                p0.lon() + (p1.lon() - p0.lon()) * f,
            )
            .expect("interpolated point on the globe")
        }
        (Some((_, p)), _) | (None, Some(&(_, p))) => p,
        (None, None) => unreachable!("every vessel reports near each acquisition"),
    }
}

fn draw_weighted(rng: &mut ChaCha8Rng) -> ShipClass {
    let total: f64 = CLASS_WEIGHTS.iter().map(|w| w.1).sum();
    let mut x = rng.random_range(0.0..total);
    for &(class, w) in &CLASS_WEIGHTS {
        if x < w {
            return class;
        }
        x -= w;
    }
    CLASS_WEIGHTS[CLASS_WEIGHTS.len() - 1].0
}

fn draw_in_family(family: CargoFamily, rng: &mut ChaCha8Rng) -> ShipClass {
    loop {
        let c = draw_weighted(rng);
        if c.family() == family {
            return c;
        }
    }
}

fn make_record(i: usize, class: ShipClass, rng: &mut ChaCha8Rng) -> VesselRecord {
    let (family, dwt) = match class {
        ShipClass::GeneralCargo => (CargoFamily::Dry, rng.random_range(1_500.0..6_000.0)),
        ShipClass::BulkCarrier => (CargoFamily::Dry, rng.random_range(35_000.0..180_000.0)),
        ShipClass::Tanker => (CargoFamily::Liquid, rng.random_range(1_000.0..6_000.0)),
        ShipClass::Vlcc => (CargoFamily::Liquid, rng.random_range(160_000.0..320_000.0)),
        _ => (CargoFamily::Other, 0.0),
    };
    let dwt: f64 = f64::round(dwt);
    let noise: f64 = rng.random_range(-0.05..0.05);
    let length = ((dwt.max(500.0) / 0.02).powf(1.0 / 2.9) * (1.0 + noise)).clamp(20.0, 400.0);
    let length = (length * 10.0).round() / 10.0;
    VesselRecord {
        vessel_id: VesselId::new(format!("{}", 273_000_001 + i)),
        imo: Some(imo_with_check_digit(900_000 + i as u32)),
        name: format!("SYN {i:04}"),
        length_m: length,
        beam_m: (length / 6.0 * 10.0).round() / 10.0,
        dwt,
        cargo_family: family,
    }
}

/// Appends the check digit to a six-digit IMO stem.
pub fn imo_with_check_digit(stem: u32) -> u32 {
    let digits: Vec<u32> = format!("{stem:06}")
        .bytes()
        .map(|b| u32::from(b - b'0'))
        .collect();
    let sum: u32 = digits.iter().zip((2..=7).rev()).map(|(d, w)| d * w).sum();
    stem * 10 + sum % 10
}

fn base_draught(r: &VesselRecord) -> f64 {
    ((r.length_m / 20.0).clamp(2.5, 20.0) * 10.0).round() / 10.0
}

fn draught_at(v: &Vessel, t: i64) -> f64 {
    let d = match v.draught_change {
        Some((lo, hi, delta)) if t >= lo => {
            let f = ((t - lo) as f64 / (hi - lo) as f64).min(1.0);
            v.base_draught + delta * f
        }
        _ => v.base_draught,
    };
    (d * 10.0).round() / 10.0
}

fn detection(scene: &SceneMeta, label: TileLabel, bbox: BBox, confidence: f64) -> Detection {
    let (cx, cy) = bbox.center();
    Detection {
        scene_id: scene.scene_id.clone(),
        label,
        bbox,
        confidence,
        geo_center: scene.pixel_to_geo(cx, cy).expect("box center inside scene"),
        acquired_at: scene.acquired_at,
        resolution_m: scene.resolution_m,
    }
}

fn clamp_box(scene: &SceneMeta, x0: f64, y0: f64, x1: f64, y1: f64) -> BBox {
    let (w, h) = (f64::from(scene.width), f64::from(scene.height));
    let (x0, y0) = (x0.clamp(0.0, w - 1.0), y0.clamp(0.0, h - 1.0));
    let (x1, y1) = (x1.clamp(x0 + 1.0, w), y1.clamp(y0 + 1.0, h));
    BBox {
        x0,
        y0,
        w: x1 - x0,
        h: y1 - y0,
    }
}

/// Box whose diagonal equals the ship length.
fn ship_bbox(scene: &SceneMeta, p: GeoPoint, length_m: f64, heading: f64) -> BBox {
    let (cx, cy) = scene.geo_to_pixel(p).expect("ship inside its scene");
    let l = length_m / scene.resolution_m;
    let (w, h) = (
        (l * heading.cos()).abs().max(1.0),
        (l * heading.sin()).abs().max(1.0),
    );
    clamp_box(
        scene,
        cx - w / 2.0,
        cy - h / 2.0,
        cx + w / 2.0,
        cy + h / 2.0,
    )
}

fn pair_bbox(scene: &SceneMeta, pa: GeoPoint, la: f64, pb: GeoPoint, lb: f64) -> BBox {
    let (ax, ay) = scene.geo_to_pixel(pa).expect("ship inside its scene");
    let (bx, by) = scene.geo_to_pixel(pb).expect("ship inside its scene");
    let (ra, rb) = (la / scene.resolution_m / 2.0, lb / scene.resolution_m / 2.0);
    clamp_box(
        scene,
        (ax - ra).min(bx - rb),
        (ay - ra).min(by - rb),
        (ax + ra).max(bx + rb),
        (ay + ra).max(by + rb),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ais::imo_check_digit_ok;

    #[test]
    fn imo_digits() {
        assert_eq!(imo_with_check_digit(913_427), 9_134_270);
        for stem in [100_000, 900_123, 999_999] {
            assert!(imo_check_digit_ok(imo_with_check_digit(stem)));
        }
    }

    #[test]
    fn config_checks() {
        let c = SynthConfig {
            vessels: 9,
            sts_events: 5,
            ..Default::default()
        };
        assert!(generate_scenario(1, &c).is_err());
        let c = SynthConfig {
            dark_fraction: 1.5,
            ..Default::default()
        };
        assert!(generate_scenario(1, &c).is_err());
        let c = SynthConfig {
            duration_s: 6 * 3_600,
            ..Default::default()
        };
        assert!(generate_scenario(1, &c).is_err());
    }

    #[test]
    fn deterministic() {
        let c = SynthConfig::default();
        assert_eq!(
            generate_scenario(7, &c).unwrap(),
            generate_scenario(7, &c).unwrap()
        );
        assert_ne!(
            generate_scenario(7, &c).unwrap().fixes,
            generate_scenario(8, &c).unwrap().fixes
        );
    }

    #[test]
    fn dark_share() {
        let c = SynthConfig {
            vessels: 30,
            sts_events: 10,
            dark_fraction: 0.4,
            ..Default::default()
        };
        let s = generate_scenario(3, &c).unwrap();
        assert_eq!(s.truth.len(), 10);
        assert_eq!(s.dark_count(), 4);
        assert_eq!(s.scenes.len(), 10);
        for p in s.truth_dark() {
            let gone = p.suppressed.as_ref().unwrap();
            let scene = s
                .scenes
                .iter()
                .find(|sc| sc.scene_id == p.scene_id)
                .unwrap();
            assert!(!s
                .fixes
                .iter()
                .any(|f| &f.vessel_id == gone && (f.t - scene.acquired_at).abs() <= 24 * 3_600));
        }
    }

    #[test]
    fn planted_margins() {
        let c = SynthConfig::default();
        let s = generate_scenario(11, &c).unwrap();
        for p in &s.truth {
            let d = p.event.duration_s();
            assert!(d as f64 >= 1.1 * c.sts.min_duration_s as f64);
            assert!(p.event.mean_separation_m >= 50.0 && p.event.mean_separation_m <= 400.0);
        }
    }
}
