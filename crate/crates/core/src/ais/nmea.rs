//! NMEA 0183 `!AIVDM` / `!AIVDO` decoding for AIS message types 1, 2, 3
//! (class A position report) and 5 (static and voyage related data).
//!
//! Bit layouts follow ITU-R M.1371. Field values are kept in their raw
//! integer encodings; accessor methods convert to physical units and map
//! the "not available" sentinels to `None`.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use thiserror::Error;

use super::{PositionFix, VesselId};
use crate::geo::GeoPoint;
use crate::time::Timestamp;

/// Raw latitude meaning "not available" (91 degrees in 1/10000 minute).
pub const LAT_NOT_AVAILABLE: i32 = 91 * 600_000;
/// Raw longitude meaning "not available" (181 degrees in 1/10000 minute).
pub const LON_NOT_AVAILABLE: i32 = 181 * 600_000;
pub const SOG_NOT_AVAILABLE: u16 = 1023;
pub const COG_NOT_AVAILABLE: u16 = 3600;
pub const HEADING_NOT_AVAILABLE: u16 = 511;

const POSITION_REPORT_BITS: usize = 168;
/// Type 5 is 424 bits; some transceivers drop the trailing spare bits.
const STATIC_VOYAGE_MIN_BITS: usize = 420;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NmeaError {
    #[error("checksum mismatch: computed {computed:02X}, sentence carries {found:02X}")]
    ChecksumMismatch { computed: u8, found: u8 },
    #[error("unsupported AIS message type {0}")]
    UnsupportedMessageType(u8),
    #[error("payload truncated: {bits} bits, need {needed}")]
    TruncatedPayload { bits: usize, needed: usize },
    #[error("malformed sentence: {0}")]
    Malformed(&'static str),
}

/// Types 1, 2 and 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionReport {
    pub msg_type: u8,
    pub repeat: u8,
    pub mmsi: u32,
    pub nav_status: u8,
    pub rot: i8,
    /// 0.1 knot units; 1023 = not available.
    pub sog_raw: u16,
    pub position_accuracy: bool,
    /// 1/10000 minute.
    pub lon_raw: i32,
    /// 1/10000 minute.
    pub lat_raw: i32,
    /// 0.1 degree units; 3600 = not available.
    pub cog_raw: u16,
    pub heading: u16,
    pub utc_second: u8,
    pub maneuver: u8,
    pub spare: u8,
    pub raim: bool,
    pub radio: u32,
}

impl PositionReport {
    pub fn sog(&self) -> Option<f64> {
        (self.sog_raw != SOG_NOT_AVAILABLE).then(|| f64::from(self.sog_raw) / 10.0)
    }

    pub fn lat(&self) -> Option<f64> {
        (self.lat_raw != LAT_NOT_AVAILABLE).then(|| f64::from(self.lat_raw) / 600_000.0)
    }

    pub fn lon(&self) -> Option<f64> {
        (self.lon_raw != LON_NOT_AVAILABLE).then(|| f64::from(self.lon_raw) / 600_000.0)
    }

    pub fn cog(&self) -> Option<f64> {
        (self.cog_raw < COG_NOT_AVAILABLE).then(|| f64::from(self.cog_raw) / 10.0)
    }

    pub fn true_heading(&self) -> Option<u16> {
        (self.heading < 360).then_some(self.heading)
    }

    /// Position as a validated point. Out-of-range coordinates are rejected,
    /// never clamped; 180 degrees east is the only value that wraps.
    pub fn position(&self) -> Option<GeoPoint> {
        let lat = self.lat()?;
        let lon = self.lon()?;
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return None;
        }
        GeoPoint::new(lat, lon).ok()
    }
}

/// Type 5.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticVoyageData {
    pub repeat: u8,
    pub mmsi: u32,
    pub ais_version: u8,
    /// 0 = not available.
    pub imo_raw: u32,
    pub callsign: String,
    pub name: String,
    pub ship_type: u8,
    pub to_bow: u16,
    pub to_stern: u16,
    pub to_port: u8,
    pub to_starboard: u8,
    pub epfd: u8,
    pub eta_month: u8,
    pub eta_day: u8,
    pub eta_hour: u8,
    pub eta_minute: u8,
    /// 0.1 m units; 0 = not available.
    pub draught_raw: u8,
    pub destination: String,
    pub dte: bool,
}

impl StaticVoyageData {
    pub fn imo(&self) -> Option<u32> {
        (self.imo_raw != 0).then_some(self.imo_raw)
    }

    pub fn draught(&self) -> Option<f64> {
        (self.draught_raw != 0).then(|| f64::from(self.draught_raw) / 10.0)
    }

    pub fn length_m(&self) -> Option<f64> {
        let l = u32::from(self.to_bow) + u32::from(self.to_stern);
        (l > 0).then(|| f64::from(l))
    }

    pub fn beam_m(&self) -> Option<f64> {
        let b = u32::from(self.to_port) + u32::from(self.to_starboard);
        (b > 0).then(|| f64::from(b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AisMessage {
    Position(PositionReport),
    StaticVoyage(StaticVoyageData),
}

impl AisMessage {
    pub fn mmsi(&self) -> u32 {
        match self {
            AisMessage::Position(p) => p.mmsi,
            AisMessage::StaticVoyage(s) => s.mmsi,
        }
    }
}

/// One part of a multi-sentence message, waiting for its siblings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub total: u8,
    pub number: u8,
    pub sequence_id: Option<u8>,
    pub channel: String,
    pub payload: String,
    pub fill_bits: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Message(AisMessage),
    Fragment(Fragment),
}

/// XOR of every byte between the leading `!`/`$` and the `*`.
pub fn checksum(body: &str) -> u8 {
    body.bytes().fold(0, |acc, b| acc ^ b)
}

/// Decodes one sentence. Single-sentence messages decode fully;
/// parts of multi-sentence messages come back as [`Decoded::Fragment`].
pub fn decode_nmea_sentence(line: &str) -> Result<Decoded, NmeaError> {
    let line = line.trim();
    if !(line.starts_with("!AIVDM") || line.starts_with("!AIVDO")) {
        return Err(NmeaError::Malformed("not an !AIVDM/!AIVDO sentence"));
    }
    let star = line
        .rfind('*')
        .ok_or(NmeaError::Malformed("missing checksum"))?;
    let body = &line[1..star];
    let cs_text = &line[star + 1..];
    if cs_text.len() != 2
        || !cs_text
            .bytes()
            .all(|b| matches!(b, b'0'..=b'9' | b'A'..=b'F'))
    {
        return Err(NmeaError::Malformed(
            "checksum must be two uppercase hex digits",
        ));
    }
    let found =
        u8::from_str_radix(cs_text, 16).map_err(|_| NmeaError::Malformed("checksum is not hex"))?;
    let computed = checksum(body);
    if computed != found {
        return Err(NmeaError::ChecksumMismatch { computed, found });
    }

    let fields: Vec<&str> = body.split(',').collect();
    if fields.len() != 7 {
        return Err(NmeaError::Malformed("expected 7 comma-separated fields"));
    }
    let total = parse_small(fields[1], "fragment count")?;
    let number = parse_small(fields[2], "fragment number")?;
    if total == 0 || number == 0 || number > total {
        return Err(NmeaError::Malformed("fragment numbering out of range"));
    }
    let sequence_id = if fields[3].is_empty() {
        None
    } else {
        Some(parse_small(fields[3], "sequence id")?)
    };
    let payload = fields[5];
    let fill_bits = parse_small(fields[6], "fill bits")?;
    if fill_bits > 5 {
        return Err(NmeaError::Malformed("fill bits above 5"));
    }

    if total == 1 {
        decode_payload(payload, fill_bits).map(Decoded::Message)
    } else {
        Ok(Decoded::Fragment(Fragment {
            total,
            number,
            sequence_id,
            channel: fields[4].to_owned(),
            payload: payload.to_owned(),
            fill_bits,
        }))
    }
}

fn parse_small(s: &str, what: &'static str) -> Result<u8, NmeaError> {
    s.parse::<u8>().map_err(|_| NmeaError::Malformed(what))
}

/// Unpacks 6-bit armored ASCII into a bit buffer.
fn unarmor(payload: &str, fill_bits: u8) -> Result<Bits, NmeaError> {
    let mut bytes = Vec::with_capacity(payload.len() * 6 / 8 + 1);
    let mut acc: u32 = 0;
    let mut nacc = 0;
    for c in payload.bytes() {
        let v = match c {
            b'0'..=b'W' => c - b'0',
            b'`'..=b'w' => c - b'0' - 8,
            _ => return Err(NmeaError::Malformed("invalid payload character")),
        };
        acc = (acc << 6) | u32::from(v);
        nacc += 6;
        while nacc >= 8 {
            nacc -= 8;
            bytes.push((acc >> nacc) as u8);
        }
    }
    if nacc > 0 {
        bytes.push((acc << (8 - nacc)) as u8);
    }
    let len = (payload.len() * 6).saturating_sub(usize::from(fill_bits));
    Ok(Bits { bytes, len })
}

struct Bits {
    bytes: Vec<u8>,
    len: usize,
}

impl Bits {
    /// Unsigned field of `width` ≤ 32 bits at `start`; bits past the end read as 0.
    fn uint(&self, start: usize, width: usize) -> u32 {
        let mut v: u64 = 0;
        for i in start..start + width {
            let bit = if i < self.len {
                (self.bytes[i / 8] >> (7 - i % 8)) & 1
            } else {
                0
            };
            v = (v << 1) | u64::from(bit);
        }
        v as u32
    }

    fn int(&self, start: usize, width: usize) -> i32 {
        let raw = self.uint(start, width);
        let shift = 32 - width;
        ((raw << shift) as i32) >> shift
    }

    fn flag(&self, start: usize) -> bool {
        self.uint(start, 1) == 1
    }

    fn text(&self, start: usize, chars: usize) -> String {
        let s: String = (0..chars)
            .map(|i| sixbit_char(self.uint(start + 6 * i, 6) as u8))
            .collect();
        s.trim_end_matches(['@', ' ']).to_owned()
    }
}

fn sixbit_char(v: u8) -> char {
    if v < 32 {
        char::from(v + 64)
    } else {
        char::from(v)
    }
}

/// Decodes a de-fragmented payload.
pub fn decode_payload(payload: &str, fill_bits: u8) -> Result<AisMessage, NmeaError> {
    let bits = unarmor(payload, fill_bits)?;
    if bits.len < 6 {
        return Err(NmeaError::TruncatedPayload {
            bits: bits.len,
            needed: 6,
        });
    }
    let msg_type = bits.uint(0, 6) as u8;
    match msg_type {
        1..=3 => {
            require(&bits, POSITION_REPORT_BITS)?;
            Ok(AisMessage::Position(PositionReport {
                msg_type,
                repeat: bits.uint(6, 2) as u8,
                mmsi: bits.uint(8, 30),
                nav_status: bits.uint(38, 4) as u8,
                rot: bits.int(42, 8) as i8,
                sog_raw: bits.uint(50, 10) as u16,
                position_accuracy: bits.flag(60),
                lon_raw: bits.int(61, 28),
                lat_raw: bits.int(89, 27),
                cog_raw: bits.uint(116, 12) as u16,
                heading: bits.uint(128, 9) as u16,
                utc_second: bits.uint(137, 6) as u8,
                maneuver: bits.uint(143, 2) as u8,
                spare: bits.uint(145, 3) as u8,
                raim: bits.flag(148),
                radio: bits.uint(149, 19),
            }))
        }
        5 => {
            require(&bits, STATIC_VOYAGE_MIN_BITS)?;
            Ok(AisMessage::StaticVoyage(StaticVoyageData {
                repeat: bits.uint(6, 2) as u8,
                mmsi: bits.uint(8, 30),
                ais_version: bits.uint(38, 2) as u8,
                imo_raw: bits.uint(40, 30),
                callsign: bits.text(70, 7),
                name: bits.text(112, 20),
                ship_type: bits.uint(232, 8) as u8,
                to_bow: bits.uint(240, 9) as u16,
                to_stern: bits.uint(249, 9) as u16,
                to_port: bits.uint(258, 6) as u8,
                to_starboard: bits.uint(264, 6) as u8,
                epfd: bits.uint(270, 4) as u8,
                eta_month: bits.uint(274, 4) as u8,
                eta_day: bits.uint(278, 5) as u8,
                eta_hour: bits.uint(283, 5) as u8,
                eta_minute: bits.uint(288, 6) as u8,
                draught_raw: bits.uint(294, 8) as u8,
                destination: bits.text(302, 20),
                dte: bits.flag(422),
            }))
        }
        other => Err(NmeaError::UnsupportedMessageType(other)),
    }
}

fn require(bits: &Bits, needed: usize) -> Result<(), NmeaError> {
    if bits.len < needed {
        Err(NmeaError::TruncatedPayload {
            bits: bits.len,
            needed,
        })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GroupKey {
    total: u8,
    sequence_id: Option<u8>,
    channel: String,
}

#[derive(Debug)]
struct Partial {
    parts: Vec<Option<(String, u8)>>,
}

/// Joins multi-sentence messages. One assembler per source stream.
#[derive(Debug, Default)]
pub struct FragmentAssembler {
    pending: HashMap<GroupKey, Partial>,
}

impl FragmentAssembler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Decodes a sentence; returns a message once all its parts have arrived.
    pub fn feed(&mut self, line: &str) -> Result<Option<AisMessage>, NmeaError> {
        match decode_nmea_sentence(line)? {
            Decoded::Message(m) => Ok(Some(m)),
            Decoded::Fragment(f) => self.push(f),
        }
    }

    pub fn push(&mut self, f: Fragment) -> Result<Option<AisMessage>, NmeaError> {
        let key = GroupKey {
            total: f.total,
            sequence_id: f.sequence_id,
            channel: f.channel,
        };
        let total = usize::from(f.total);
        let idx = usize::from(f.number) - 1;
        if idx == 0 {
            // a new first part restarts the group
            self.pending.remove(&key);
        }
        let partial = self.pending.entry(key.clone()).or_insert_with(|| Partial {
            parts: vec![None; total],
        });
        partial.parts[idx] = Some((f.payload, f.fill_bits));
        if partial.parts.iter().any(Option::is_none) {
            return Ok(None);
        }
        let partial = self.pending.remove(&key).expect("group present");
        let mut payload = String::new();
        let mut fill = 0;
        for (p, fb) in partial.parts.into_iter().flatten() {
            payload.push_str(&p);
            fill = fb;
        }
        decode_payload(&payload, fill).map(Some)
    }

    /// Groups still waiting for parts.
    pub fn pending(&self) -> usize {
        self.pending.len()
    }
}

/// Splits an optional receive-time prefix from a log line.
///
/// Accepted forms: an NMEA 4.10 tag block carrying `c:<unix seconds>`,
/// or a leading Unix or ISO-8601 timestamp separated from the sentence by
/// whitespace, a comma or a semicolon.
pub fn split_log_line(line: &str) -> (Option<Timestamp>, &str) {
    let line = line.trim();
    if let Some(rest) = line.strip_prefix('\\') {
        if let Some(end) = rest.find('\\') {
            let tag = &rest[..end];
            let tag = tag.split('*').next().unwrap_or(tag);
            let t = tag
                .split(',')
                .find_map(|kv| kv.strip_prefix("c:"))
                .and_then(|v| v.parse::<i64>().ok())
                .map(|v| if v > 10_000_000_000 { v / 1000 } else { v })
                .map(Timestamp);
            return (t, rest[end + 1..].trim());
        }
    }
    match line.find('!') {
        Some(0) | None => (None, line),
        Some(i) => {
            let prefix = line[..i].trim_end_matches([' ', '\t', ',', ';']);
            let t = prefix
                .parse::<i64>()
                .ok()
                .map(Timestamp)
                .or_else(|| Timestamp::parse(prefix).ok());
            (t, &line[i..])
        }
    }
}

/// Counters kept while ingesting an NMEA log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NmeaStats {
    pub lines: usize,
    pub messages: usize,
    pub position_reports: usize,
    pub static_reports: usize,
    pub checksum_errors: usize,
    pub truncated: usize,
    pub malformed: usize,
    /// Skipped messages by type.
    pub unsupported: BTreeMap<u8, usize>,
    /// Position reports without a receive timestamp.
    pub untimed: usize,
    /// Position reports whose position or speed is unavailable or invalid.
    pub rejected_fixes: usize,
    pub incomplete_groups: usize,
}

#[derive(Debug, Clone, Default)]
pub struct NmeaIngest {
    pub fixes: Vec<PositionFix>,
    /// Latest static report per MMSI.
    pub statics: BTreeMap<u32, StaticVoyageData>,
    pub stats: NmeaStats,
}

/// Reads a timestamped NMEA log into position fixes keyed by MMSI.
///
/// Draught on each fix comes from the latest type 5 report seen earlier
/// in the stream for the same MMSI.
pub fn read_nmea_log<R: BufRead>(reader: R) -> std::io::Result<NmeaIngest> {
    let mut out = NmeaIngest::default();
    let mut assembler = FragmentAssembler::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.stats.lines += 1;
        let (t, sentence) = split_log_line(&line);
        let msg = match assembler.feed(sentence) {
            Ok(Some(m)) => m,
            Ok(None) => continue,
            Err(e) => {
                match e {
                    NmeaError::ChecksumMismatch { .. } => out.stats.checksum_errors += 1,
                    NmeaError::UnsupportedMessageType(ty) => {
                        *out.stats.unsupported.entry(ty).or_default() += 1
                    }
                    NmeaError::TruncatedPayload { .. } => out.stats.truncated += 1,
                    NmeaError::Malformed(_) => out.stats.malformed += 1,
                }
                continue;
            }
        };
        out.stats.messages += 1;
        match msg {
            AisMessage::Position(p) => {
                out.stats.position_reports += 1;
                let Some(t) = t else {
                    out.stats.untimed += 1;
                    continue;
                };
                let draught = out.statics.get(&p.mmsi).and_then(StaticVoyageData::draught);
                let fix = match (p.position(), p.sog()) {
                    (Some(pos), Some(sog)) => {
                        PositionFix::new(VesselId::new(p.mmsi.to_string()), t, pos, sog, draught)
                            .ok()
                    }
                    _ => None,
                };
                match fix {
                    Some(f) => out.fixes.push(f),
                    None => out.stats.rejected_fixes += 1,
                }
            }
            AisMessage::StaticVoyage(s) => {
                out.stats.static_reports += 1;
                out.statics.insert(s.mmsi, s);
            }
        }
    }
    out.stats.incomplete_groups = assembler.pending();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TYPE1: &str = "!AIVDM,1,1,,B,177KQJ5000G?tO`K>RA1wUbN0TKH,0*5C";

    #[test]
    fn decodes_reference_position_report() {
        let Decoded::Message(AisMessage::Position(p)) = decode_nmea_sentence(TYPE1).unwrap() else {
            panic!("expected a position report");
        };
        assert_eq!(p.msg_type, 1);
        assert_eq!(p.mmsi, 477_553_000);
        assert_eq!(p.nav_status, 5);
        assert_eq!(p.rot, 0);
        assert_eq!(p.sog(), Some(0.0));
        assert_eq!(p.lon_raw, -73_407_500);
        assert_eq!(p.lat_raw, 28_549_700);
        assert!((p.lon().unwrap() + 122.345_833_333).abs() < 1e-8);
        assert!((p.lat().unwrap() - 47.582_833_333).abs() < 1e-8);
        assert_eq!(p.cog(), Some(51.0));
        assert_eq!(p.heading, 181);
        assert_eq!(p.utc_second, 15);
        assert_eq!(p.radio, 149_208);
    }

    #[test]
    fn checksum_mismatch() {
        let bad = TYPE1.replace("*5C", "*5D");
        assert_eq!(
            decode_nmea_sentence(&bad),
            Err(NmeaError::ChecksumMismatch {
                computed: 0x5C,
                found: 0x5D
            })
        );
        let bad = TYPE1.replace("177KQ", "177KR");
        assert!(matches!(
            decode_nmea_sentence(&bad),
            Err(NmeaError::ChecksumMismatch { .. })
        ));
    }

    #[test]
    fn rejects_foreign_sentences() {
        assert!(matches!(
            decode_nmea_sentence("$GPGGA,123519,4807.038,N*47"),
            Err(NmeaError::Malformed(_))
        ));
        assert!(matches!(
            decode_nmea_sentence("!AIVDM,1,1,,B,177KQJ5000G?tO`K>RA1wUbN0TKH,0"),
            Err(NmeaError::Malformed(_))
        ));
    }

    fn with_checksum(body: &str) -> String {
        format!("!{body}*{:02X}", checksum(body))
    }

    #[test]
    fn unsupported_and_truncated() {
        // type 18 ('B' = 18)
        let s = with_checksum("AIVDM,1,1,,A,B52K>;h00Fc>jpUlNV@ikwpUoP06,0");
        assert_eq!(
            decode_nmea_sentence(&s),
            Err(NmeaError::UnsupportedMessageType(18))
        );
        let s = with_checksum("AIVDM,1,1,,B,177KQJ5000G?tO,0");
        assert!(matches!(
            decode_nmea_sentence(&s),
            Err(NmeaError::TruncatedPayload { needed: 168, .. })
        ));
    }

    #[test]
    fn single_fragment_waits_for_sibling() {
        let first = with_checksum(
            "AIVDM,2,1,3,A,55?MbV02;H;s<HtKR20EHE:0@T4@Dn2222222216L961O5Gf0NSQEp6ClRp8,0",
        );
        let second = with_checksum("AIVDM,2,2,3,A,88888888880,2");
        assert!(matches!(
            decode_nmea_sentence(&first),
            Ok(Decoded::Fragment(Fragment {
                total: 2,
                number: 1,
                ..
            }))
        ));
        let mut asm = FragmentAssembler::new();
        assert_eq!(asm.feed(&first).unwrap(), None);
        assert_eq!(asm.pending(), 1);
        let msg = asm.feed(&second).unwrap().expect("assembled");
        assert_eq!(asm.pending(), 0);
        let AisMessage::StaticVoyage(s) = msg else {
            panic!("expected type 5");
        };
        assert_eq!(s.mmsi, 351_759_000);
        assert_eq!(s.imo(), Some(9_134_270));
        assert_eq!(s.callsign, "3FOF8");
        assert_eq!(s.name, "EVER DIADEM");
        assert_eq!(s.ship_type, 70);
        assert_eq!(s.length_m(), Some(295.0));
        assert_eq!(s.beam_m(), Some(32.0));
        assert_eq!(s.draught(), Some(12.2));
        assert_eq!(s.destination, "NEW YORK");
    }

    #[test]
    fn log_line_prefixes() {
        assert_eq!(split_log_line(TYPE1), (None, TYPE1));
        let line = format!("1690891200 {TYPE1}");
        assert_eq!(
            split_log_line(&line),
            (Some(Timestamp(1_690_891_200)), TYPE1)
        );
        let (t, _) = split_log_line(&format!("2023-08-01T12:00:00Z,{TYPE1}"));
        assert_eq!(t, Some(Timestamp(1_690_891_200)));
        let line = format!("\\s:r003669945,c:1690891200*7F\\{TYPE1}");
        assert_eq!(
            split_log_line(&line),
            (Some(Timestamp(1_690_891_200)), TYPE1)
        );
    }

    #[test]
    fn log_ingest_counts_and_rejects() {
        let log = format!(
            "1690891200 {TYPE1}\n{TYPE1}\n1690891260 {}\n\n1690891300 {TYPE1}\n",
            TYPE1.replace("*5C", "*00")
        );
        let out = read_nmea_log(log.as_bytes()).unwrap();
        assert_eq!(out.fixes.len(), 2);
        assert_eq!(out.stats.lines, 4);
        assert_eq!(out.stats.untimed, 1);
        assert_eq!(out.stats.checksum_errors, 1);
        assert_eq!(out.fixes[0].vessel_id.as_str(), "477553000");
        assert_eq!(out.fixes[1].t, Timestamp(1_690_891_300));
    }
}
