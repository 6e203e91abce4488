use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use csv::{ByteRecord, StringRecord};

use super::{CargoFamily, IngestError, PositionFix, VesselId, VesselRecord};
use crate::exec::Exec;
use crate::geo::GeoPoint;
use crate::time::Timestamp;

pub const POSITION_COLUMNS: [&str; 6] = ["vessel_id", "timestamp", "lat", "lon", "sog", "draught"];
pub const REGISTRY_COLUMNS: [&str; 7] = [
    "vessel_id",
    "imo",
    "name",
    "length_m",
    "beam_m",
    "dwt",
    "cargo_family",
];

const PARSE_CHUNK: usize = 16_384;

#[derive(Debug, Clone, Default)]
pub struct PositionTable {
    pub fixes: Vec<PositionFix>,
    /// Data rows that failed validation and were dropped.
    pub rejected: usize,
}

pub fn load_position_table(path: &Path) -> Result<PositionTable, IngestError> {
    load_position_table_with(path, Exec::Sequential)
}

pub fn load_position_table_with(path: &Path, exec: Exec) -> Result<PositionTable, IngestError> {
    read_position_table(BufReader::new(File::open(path)?), exec)
}

struct PositionColumns {
    vessel_id: usize,
    timestamp: usize,
    lat: usize,
    lon: usize,
    sog: usize,
    draught: Option<usize>,
}

/// Reads `vessel_id,timestamp,lat,lon,sog[,draught]`. Row parsing runs in
/// chunks through `exec`; output order matches file order either way.
pub fn read_position_table<R: Read>(reader: R, exec: Exec) -> Result<PositionTable, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = read_headers(&mut rdr)?;
    let cols = PositionColumns {
        vessel_id: require_column(&headers, "vessel_id")?,
        timestamp: require_column(&headers, "timestamp")?,
        lat: require_column(&headers, "lat")?,
        lon: require_column(&headers, "lon")?,
        sog: require_column(&headers, "sog")?,
        draught: find_column(&headers, "draught"),
    };

    let mut records = Vec::new();
    let mut rec = ByteRecord::new();
    while rdr.read_byte_record(&mut rec)? {
        records.push(std::mem::take(&mut rec));
    }

    let parsed = exec.map_chunks(&records, PARSE_CHUNK, |chunk| {
        chunk
            .iter()
            .map(|r| parse_position_row(r, &cols))
            .collect::<Vec<_>>()
    });
    let mut table = PositionTable {
        fixes: Vec::with_capacity(records.len()),
        rejected: 0,
    };
    for fix in parsed.into_iter().flatten() {
        match fix {
            Some(f) => table.fixes.push(f),
            None => table.rejected += 1,
        }
    }
    Ok(table)
}

fn parse_position_row(r: &ByteRecord, c: &PositionColumns) -> Option<PositionFix> {
    let field = |i: usize| {
        r.get(i)
            .and_then(|b| std::str::from_utf8(b).ok())
            .map(str::trim)
    };
    let id = field(c.vessel_id).filter(|s| !s.is_empty())?;
    let t = Timestamp::parse(field(c.timestamp)?).ok()?;
    let lat: f64 = field(c.lat)?.parse().ok()?;
    let lon: f64 = field(c.lon)?.parse().ok()?;
    // 181 is the AIS "unavailable" sentinel; nothing outside ±180 is wrapped
    if !(-180.0..=180.0).contains(&lon) {
        return None;
    }
    let pos = GeoPoint::new(lat, lon).ok()?;
    let sog: f64 = field(c.sog)?.parse().ok()?;
    let draught = match c.draught.and_then(field) {
        None | Some("") => None,
        Some(s) => {
            let d: f64 = s.parse().ok()?;
            (d != 0.0).then_some(d)
        }
    };
    PositionFix::new(VesselId::new(id), t, pos, sog, draught).ok()
}

pub fn write_position_table<W: Write>(writer: W, fixes: &[PositionFix]) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(POSITION_COLUMNS)?;
    for f in fixes {
        w.write_record([
            f.vessel_id.as_str(),
            &f.t.to_string(),
            &f.pos.lat().to_string(),
            &f.pos.lon().to_string(),
            &f.sog.to_string(),
            &f.draught.map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    pub records: Vec<VesselRecord>,
    pub rejected: usize,
}

pub fn load_registry(path: &Path) -> Result<Registry, IngestError> {
    read_registry(BufReader::new(File::open(path)?))
}

/// Reads `vessel_id,imo,name,length_m,beam_m,dwt,cargo_family`. Rows that
/// break a [`VesselRecord`] invariant are dropped and counted.
pub fn read_registry<R: Read>(reader: R) -> Result<Registry, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = read_headers(&mut rdr)?;
    let idx: Vec<usize> = REGISTRY_COLUMNS
        .iter()
        .map(|c| require_column(&headers, c))
        .collect::<Result<_, _>>()?;

    let mut out = Registry::default();
    for row in rdr.records() {
        let row = row?;
        match parse_registry_row(&row, &idx) {
            Some(r) => out.records.push(r),
            None => out.rejected += 1,
        }
    }
    Ok(out)
}

fn parse_registry_row(row: &StringRecord, idx: &[usize]) -> Option<VesselRecord> {
    let f = |k: usize| row.get(idx[k]).map(str::trim);
    let vessel_id = f(0).filter(|s| !s.is_empty())?;
    let imo = match f(1)? {
        "" => None,
        s => Some(s.parse().ok()?),
    };
    let rec = VesselRecord {
        vessel_id: VesselId::new(vessel_id),
        imo,
        name: f(2)?.to_owned(),
        length_m: f(3)?.parse().ok()?,
        beam_m: f(4)?.parse().ok()?,
        dwt: f(5)?.parse().ok()?,
        cargo_family: CargoFamily::parse(f(6)?)?,
    };
    rec.validate().ok()?;
    Some(rec)
}

pub fn write_registry<W: Write>(writer: W, records: &[VesselRecord]) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REGISTRY_COLUMNS)?;
    for r in records {
        w.write_record([
            r.vessel_id.as_str(),
            &r.imo.map(|i| i.to_string()).unwrap_or_default(),
            &r.name,
            &r.length_m.to_string(),
            &r.beam_m.to_string(),
            &r.dwt.to_string(),
            r.cargo_family.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn read_headers<R: Read>(rdr: &mut csv::Reader<R>) -> Result<StringRecord, IngestError> {
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    Ok(headers)
}

pub(crate) fn find_column(headers: &StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| {
        h.trim()
            .trim_start_matches('\u{feff}')
            .eq_ignore_ascii_case(name)
    })
}

fn require_column(headers: &StringRecord, name: &'static str) -> Result<usize, IngestError> {
    find_column(headers, name).ok_or(IngestError::MissingColumn(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "vessel_id,timestamp,lat,lon,sog,draught\n";

    #[test]
    fn drops_invalid_rows() {
        let csv = format!(
            "{HEADER}a,2023-08-01T00:00:00Z,45.1,36.5,0.3,12.5\n\
             a,2023-08-01T00:05:00Z,45.1,36.5,0.3,\n\
             b,2023-08-01T00:00:00Z,45.2,36.6,0.1,0\n\
             c,2023-08-01T00:00:00Z,91,36.6,0.1,\n"
        );
        let t = read_position_table(csv.as_bytes(), Exec::Sequential).unwrap();
        assert_eq!(t.fixes.len(), 3);
        assert_eq!(t.rejected, 1);
        assert_eq!(t.fixes[0].draught, Some(12.5));
        assert_eq!(t.fixes[1].draught, None);
        // draught 0 is the "not available" sentinel
        assert_eq!(t.fixes[2].draught, None);
    }

    #[test]
    fn sentinels_rejected() {
        let csv = format!(
            "{HEADER}a,2023-08-01T00:00:00Z,45.1,181,0.3,\n\
             a,2023-08-01T00:00:00Z,45.1,36.5,102.3,\n\
             a,not-a-time,45.1,36.5,1,\n\
             ,2023-08-01T00:00:00Z,45.1,36.5,1,\n\
             a,2023-08-01T00:00:00Z,45.1,36.5,1,31\n"
        );
        let t = read_position_table(csv.as_bytes(), Exec::Sequential).unwrap();
        assert!(t.fixes.is_empty());
        assert_eq!(t.rejected, 5);
    }

    #[test]
    fn header_only_and_empty() {
        let t = read_position_table(HEADER.as_bytes(), Exec::Sequential).unwrap();
        assert!(t.fixes.is_empty());
        assert_eq!(t.rejected, 0);
        assert!(matches!(
            read_position_table("".as_bytes(), Exec::Sequential),
            Err(IngestError::EmptyFile)
        ));
    }

    #[test]
    fn missing_column() {
        let csv = "vessel_id,timestamp,lat,lon\na,2023-08-01T00:00:00Z,45,36\n";
        assert!(matches!(
            read_position_table(csv.as_bytes(), Exec::Sequential),
            Err(IngestError::MissingColumn("sog"))
        ));
    }

    #[test]
    fn draught_column_optional() {
        let csv = "vessel_id,timestamp,lat,lon,sog\na,2023-08-01T00:00:00Z,45,36,0.5\n";
        let t = read_position_table(csv.as_bytes(), Exec::Sequential).unwrap();
        assert_eq!(t.fixes.len(), 1);
        assert_eq!(t.fixes[0].draught, None);
    }

    #[test]
    fn registry_validation() {
        let csv = "vessel_id,imo,name,length_m,beam_m,dwt,cargo_family\n\
                   1,9074729,ALPHA,120,20,8000,Dry\n\
                   2,,BRAVO,250,44,160000,liquid\n\
                   3,9074728,BAD IMO,120,20,8000,Dry\n\
                   4,,TOO SHORT,9,3,100,Dry\n\
                   5,,BAD FAMILY,100,15,100,Gas\n";
        let r = read_registry(csv.as_bytes()).unwrap();
        assert_eq!(r.records.len(), 2);
        assert_eq!(r.rejected, 3);
        assert_eq!(r.records[1].cargo_family, CargoFamily::Liquid);
        assert_eq!(r.records[1].imo, None);
    }

    #[test]
    fn write_then_read_is_lossless() {
        let fixes = vec![
            PositionFix::new(
                VesselId::new("273000001"),
                Timestamp(1_690_891_234),
                GeoPoint::new(45.253_123_456_789_01, 36.498_765_432_1).unwrap(),
                0.123_456_789,
                Some(11.7),
            )
            .unwrap(),
            PositionFix::new(
                VesselId::new("273000002"),
                Timestamp(1_690_891_299),
                GeoPoint::new(-0.1, -179.999_999_9).unwrap(),
                12.0,
                None,
            )
            .unwrap(),
        ];
        let mut buf = Vec::new();
        write_position_table(&mut buf, &fixes).unwrap();
        let back = read_position_table(buf.as_slice(), Exec::Parallel).unwrap();
        assert_eq!(back.fixes, fixes);
    }
}
