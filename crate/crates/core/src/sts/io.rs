use std::io::{Read, Write};

use serde_json::{json, Value};

use super::{StsError, StsEvent};
use crate::ais::VesselId;
use crate::classify::StsClass;
use crate::geo::GeoPoint;
use crate::time::Timestamp;

const COLUMNS: [&str; 9] = [
    "vessel_a",
    "vessel_b",
    "start",
    "end",
    "duration_s",
    "mid_lat",
    "mid_lon",
    "sts_class",
    "mean_separation_m",
];

pub fn write_events_csv<W: Write>(writer: W, events: &[StsEvent]) -> Result<(), StsError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for e in events {
        w.write_record([
            e.vessel_a.as_str(),
            e.vessel_b.as_str(),
            &e.start.to_string(),
            &e.end.to_string(),
            &e.duration_s().to_string(),
            &e.midpoint.lat().to_string(),
            &e.midpoint.lon().to_string(),
            e.sts_class.as_str(),
            &e.mean_separation_m.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_events_csv<R: Read>(reader: R) -> Result<Vec<StsEvent>, StsError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let bad = |reason: &str| StsError::Malformed {
            row,
            reason: reason.to_owned(),
        };
        if rec.len() != COLUMNS.len() {
            return Err(bad("wrong column count"));
        }
        let num = |k: usize| rec[k].trim().parse::<f64>().map_err(|_| bad(COLUMNS[k]));
        let ts = |k: usize| Timestamp::parse(&rec[k]).map_err(|_| bad(COLUMNS[k]));
        out.push(StsEvent {
            vessel_a: VesselId::new(rec[0].trim()),
            vessel_b: VesselId::new(rec[1].trim()),
            start: ts(2)?,
            end: ts(3)?,
            midpoint: GeoPoint::new(num(5)?, num(6)?).map_err(|_| bad("midpoint"))?,
            sts_class: StsClass::parse(&rec[7]).ok_or_else(|| bad("sts_class"))?,
            mean_separation_m: num(8)?,
        });
    }
    Ok(out)
}

/// One point feature per event, at its midpoint.
pub fn events_geojson(events: &[StsEvent]) -> Value {
    let features: Vec<Value> = events
        .iter()
        .map(|e| {
            json!({
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [e.midpoint.lon(), e.midpoint.lat()],
                },
                "properties": {
                    "vessels": [e.vessel_a.as_str(), e.vessel_b.as_str()],
                    "start": e.start.to_string(),
                    "end": e.end.to_string(),
                    "duration_s": e.duration_s(),
                    "class": e.sts_class.as_str(),
                    "mean_separation_m": e.mean_separation_m,
                },
            })
        })
        .collect();
    json!({ "type": "FeatureCollection", "features": features })
}

pub fn write_events_geojson<W: Write>(
    mut writer: W,
    events: &[StsEvent],
    run_config: Option<&Value>,
) -> Result<(), StsError> {
    let mut doc = events_geojson(events);
    if let Some(cfg) = run_config {
        doc["run_config"] = cfg.clone();
    }
    serde_json::to_writer_pretty(&mut writer, &doc).map_err(std::io::Error::from)?;
    writer.write_all(b"\n")?;
    Ok(())
}
