//! Test-side AIS encoder, written independently of the decoder, plus
//! generators for payloads that hit field extremes and sentinels.

#![allow(dead_code)]

use darksts::ais::nmea::{PositionReport, StaticVoyageData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SIXBIT_TEXT: &[u8] = b"@ABCDEFGHIJKLMNOPQRSTUVWXYZ[\\]^_ !\"#$%&'()*+,-./0123456789:;<=>?";

#[derive(Default)]
pub struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    pub fn put(&mut self, value: u64, width: usize) {
        for i in (0..width).rev() {
            self.bits.push((value >> i) & 1 == 1);
        }
    }

    pub fn put_signed(&mut self, value: i64, width: usize) {
        let mask = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        self.put(value as u64 & mask, width);
    }

    pub fn put_text(&mut self, s: &str, chars: usize) {
        let mut codes: Vec<u64> = s
            .bytes()
            .map(|b| {
                SIXBIT_TEXT
                    .iter()
                    .position(|&c| c == b)
                    .expect("six-bit character") as u64
            })
            .collect();
        codes.resize(chars, 0);
        for c in codes {
            self.put(c, 6);
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Armored payload and fill bit count.
    pub fn armor(&self) -> (String, u8) {
        let fill = (6 - self.bits.len() % 6) % 6;
        let mut bits = self.bits.clone();
        bits.extend(std::iter::repeat_n(false, fill));
        let s = bits
            .chunks(6)
            .map(|c| {
                let v = c.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b));
                char::from(if v < 40 { v + 48 } else { v + 56 })
            })
            .collect();
        (s, fill as u8)
    }
}

pub fn encode_position(p: &PositionReport) -> BitWriter {
    let mut w = BitWriter::default();
    w.put(u64::from(p.msg_type), 6);
    w.put(u64::from(p.repeat), 2);
    w.put(u64::from(p.mmsi), 30);
    w.put(u64::from(p.nav_status), 4);
    w.put_signed(i64::from(p.rot), 8);
    w.put(u64::from(p.sog_raw), 10);
    w.put(u64::from(p.position_accuracy), 1);
    w.put_signed(i64::from(p.lon_raw), 28);
    w.put_signed(i64::from(p.lat_raw), 27);
    w.put(u64::from(p.cog_raw), 12);
    w.put(u64::from(p.heading), 9);
    w.put(u64::from(p.utc_second), 6);
    w.put(u64::from(p.maneuver), 2);
    w.put(u64::from(p.spare), 3);
    w.put(u64::from(p.raim), 1);
    w.put(u64::from(p.radio), 19);
    assert_eq!(w.len(), 168);
    w
}

pub fn encode_static(s: &StaticVoyageData) -> BitWriter {
    let mut w = BitWriter::default();
    w.put(5, 6);
    w.put(u64::from(s.repeat), 2);
    w.put(u64::from(s.mmsi), 30);
    w.put(u64::from(s.ais_version), 2);
    w.put(u64::from(s.imo_raw), 30);
    w.put_text(&s.callsign, 7);
    w.put_text(&s.name, 20);
    w.put(u64::from(s.ship_type), 8);
    w.put(u64::from(s.to_bow), 9);
    w.put(u64::from(s.to_stern), 9);
    w.put(u64::from(s.to_port), 6);
    w.put(u64::from(s.to_starboard), 6);
    w.put(u64::from(s.epfd), 4);
    w.put(u64::from(s.eta_month), 4);
    w.put(u64::from(s.eta_day), 5);
    w.put(u64::from(s.eta_hour), 5);
    w.put(u64::from(s.eta_minute), 6);
    w.put(u64::from(s.draught_raw), 8);
    w.put_text(&s.destination, 20);
    w.put(u64::from(s.dte), 1);
    w.put(0, 1);
    assert_eq!(w.len(), 424);
    w
}

pub fn nmea_checksum(body: &str) -> u8 {
    body.bytes().fold(0, |a, b| a ^ b)
}

/// Splits a payload into sentences of at most `max_chars` payload characters.
pub fn to_sentences(
    payload: &str,
    fill: u8,
    max_chars: usize,
    seq: u8,
    channel: char,
) -> Vec<String> {
    let chunks: Vec<&str> = payload
        .as_bytes()
        .chunks(max_chars)
        .map(|c| std::str::from_utf8(c).unwrap())
        .collect();
    let total = chunks.len();
    chunks
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let last = i + 1 == total;
            let seq_field = if total > 1 {
                seq.to_string()
            } else {
                String::new()
            };
            let body = format!(
                "AIVDM,{total},{},{seq_field},{channel},{c},{}",
                i + 1,
                if last { fill } else { 0 }
            );
            format!("!{body}*{:02X}", nmea_checksum(&body))
        })
        .collect()
}

fn pick<T: Copy>(
    rng: &mut ChaCha8Rng,
    extremes: &[T],
    random: impl FnOnce(&mut ChaCha8Rng) -> T,
) -> T {
    if rng.random_bool(0.5) {
        extremes[rng.random_range(0..extremes.len())]
    } else {
        random(rng)
    }
}

fn text(rng: &mut ChaCha8Rng, max: usize) -> String {
    let len = rng.random_range(0..=max);
    let mut s: String = (0..len)
        .map(|_| char::from(SIXBIT_TEXT[rng.random_range(0..SIXBIT_TEXT.len())]))
        .collect();
    // trailing '@' and spaces are padding on the wire
    while s.ends_with(['@', ' ']) {
        s.pop();
    }
    s
}

pub fn random_position(rng: &mut ChaCha8Rng) -> PositionReport {
    PositionReport {
        msg_type: rng.random_range(1..=3),
        repeat: pick(rng, &[0, 3], |r| r.random_range(0..4)),
        mmsi: pick(rng, &[0, 1, (1 << 30) - 1, 999_999_999], |r| {
            r.random_range(0..1 << 30)
        }),
        nav_status: pick(rng, &[0, 15], |r| r.random_range(0..16)),
        rot: pick(rng, &[-128, -127, 0, 127], |r| r.random()),
        sog_raw: pick(rng, &[0, 1022, 1023], |r| r.random_range(0..1024)),
        position_accuracy: rng.random(),
        lon_raw: pick(
            rng,
            &[
                -108_000_000,
                108_000_000,
                181 * 600_000,
                -(1 << 27),
                (1 << 27) - 1,
            ],
            |r| r.random_range(-108_000_000..=108_000_000),
        ),
        lat_raw: pick(
            rng,
            &[
                -54_000_000,
                54_000_000,
                91 * 600_000,
                -(1 << 26),
                (1 << 26) - 1,
            ],
            |r| r.random_range(-54_000_000..=54_000_000),
        ),
        cog_raw: pick(rng, &[0, 3599, 3600, 4095], |r| r.random_range(0..4096)),
        heading: pick(rng, &[0, 359, 511], |r| r.random_range(0..512)),
        utc_second: pick(rng, &[0, 59, 60, 63], |r| r.random_range(0..64)),
        maneuver: rng.random_range(0..4),
        spare: rng.random_range(0..8),
        raim: rng.random(),
        radio: pick(rng, &[0, (1 << 19) - 1], |r| r.random_range(0..1 << 19)),
    }
}

pub fn random_static(rng: &mut ChaCha8Rng) -> StaticVoyageData {
    StaticVoyageData {
        repeat: rng.random_range(0..4),
        mmsi: pick(rng, &[0, (1 << 30) - 1], |r| r.random_range(0..1 << 30)),
        ais_version: rng.random_range(0..4),
        imo_raw: pick(rng, &[0, (1 << 30) - 1, 9_134_270], |r| {
            r.random_range(0..1 << 30)
        }),
        callsign: text(rng, 7),
        name: text(rng, 20),
        ship_type: pick(rng, &[0, 255], |r| r.random()),
        to_bow: pick(rng, &[0, 511], |r| r.random_range(0..512)),
        to_stern: pick(rng, &[0, 511], |r| r.random_range(0..512)),
        to_port: pick(rng, &[0, 63], |r| r.random_range(0..64)),
        to_starboard: pick(rng, &[0, 63], |r| r.random_range(0..64)),
        epfd: rng.random_range(0..16),
        eta_month: pick(rng, &[0, 12, 15], |r| r.random_range(0..16)),
        eta_day: pick(rng, &[0, 31], |r| r.random_range(0..32)),
        eta_hour: pick(rng, &[0, 24, 31], |r| r.random_range(0..32)),
        eta_minute: pick(rng, &[0, 60, 63], |r| r.random_range(0..64)),
        draught_raw: pick(rng, &[0, 1, 255], |r| r.random()),
        destination: text(rng, 20),
        dte: rng.random(),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
