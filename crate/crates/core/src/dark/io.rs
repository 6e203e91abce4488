use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde_json::{json, Value};

use super::{BBox, DarkError, DarkStsReport, Detection};
use crate::classify::TileLabel;
use crate::scene::SceneMeta;

const COLUMNS: [&str; 7] = [
    "scene_id",
    "class_label",
    "x0",
    "y0",
    "w",
    "h",
    "confidence",
];

pub fn load_detections(path: &Path, scenes: &[SceneMeta]) -> Result<Vec<Detection>, DarkError> {
    read_detections(BufReader::new(File::open(path)?), scenes)
}

/// Reads `scene_id,class_label,x0,y0,w,h,confidence` and places each box
/// on the ground through its scene's georeferencing.
pub fn read_detections<R: Read>(
    reader: R,
    scenes: &[SceneMeta],
) -> Result<Vec<Detection>, DarkError> {
    let by_id: HashMap<&str, &SceneMeta> =
        scenes.iter().map(|s| (s.scene_id.as_str(), s)).collect();
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = COLUMNS
        .iter()
        .map(|c| {
            crate::ais::table_find_column(&headers, c).ok_or_else(|| DarkError::MalformedRow {
                row: 1,
                reason: format!("missing column {c:?}"),
            })
        })
        .collect::<Result<_, _>>()?;

    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let bad = |reason: String| DarkError::MalformedRow { row, reason };
        let f = |k: usize| rec.get(idx[k]).map(str::trim).unwrap_or("");
        let num = |k: usize| {
            f(k).parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("bad {}", COLUMNS[k])))
        };

        let scene_id = f(0);
        let scene = by_id.get(scene_id).ok_or_else(|| DarkError::MissingScene {
            row,
            scene_id: scene_id.to_owned(),
        })?;
        let label =
            TileLabel::parse(f(1)).ok_or_else(|| bad(format!("unknown class {:?}", f(1))))?;
        let bbox = BBox {
            x0: num(2)?,
            y0: num(3)?,
            w: num(4)?,
            h: num(5)?,
        };
        let confidence = num(6)?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(bad(format!("confidence {confidence} outside [0, 1]")));
        }
        if !(bbox.w > 0.0
            && bbox.h > 0.0
            && bbox.x0 >= 0.0
            && bbox.y0 >= 0.0
            && bbox.x0 + bbox.w <= f64::from(scene.width)
            && bbox.y0 + bbox.h <= f64::from(scene.height))
        {
            return Err(bad("bbox outside scene bounds".into()));
        }
        let (cx, cy) = bbox.center();
        let geo_center = scene
            .pixel_to_geo(cx, cy)
            .map_err(|e| bad(format!("bbox center: {e}")))?;
        out.push(Detection {
            scene_id: scene_id.to_owned(),
            label,
            bbox,
            confidence,
            geo_center,
            acquired_at: scene.acquired_at,
            resolution_m: scene.resolution_m,
        });
    }
    Ok(out)
}

pub fn write_detections<W: Write>(writer: W, detections: &[Detection]) -> Result<(), DarkError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for d in detections {
        w.write_record([
            d.scene_id.as_str(),
            d.label.as_str(),
            &d.bbox.x0.to_string(),
            &d.bbox.y0.to_string(),
            &d.bbox.w.to_string(),
            &d.bbox.h.to_string(),
            &d.confidence.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Counts, per-vessel table, timeline and effective parameters.
pub fn dark_summary_json(report: &DarkStsReport, run_config: Option<&Value>) -> Value {
    let census: serde_json::Map<String, Value> = report
        .class_census
        .iter()
        .map(|(k, v)| (k.as_str().to_owned(), json!(v)))
        .collect();
    let per_vessel: Vec<Value> = report
        .per_vessel_dark
        .iter()
        .map(|(id, n)| json!({ "vessel_id": id.as_str(), "dark_sts": n }))
        .collect();
    let timeline: Vec<Value> = report
        .timeline
        .iter()
        .map(|(day, c)| json!({ "date": day.to_string(), "sts": c.sts, "dark": c.dark }))
        .collect();
    let mut doc = json!({
        "total_detections": report.total_detections,
        "sts_detections": report.sts_detections,
        "dark_count": report.dark_count,
        "class_census": census,
        "per_vessel": per_vessel,
        "timeline": timeline,
        "audit": {
            "radius_m": report.params.radius_m,
            "window_hours": report.params.window_s as f64 / 3600.0,
            "min_identities": report.params.min_identities,
        },
        "notes": report.notes,
    });
    if let Some(cfg) = run_config {
        doc["run_config"] = cfg.clone();
    }
    doc
}

/// One point feature per audited detection, summary attached as a
/// top-level member.
pub fn dark_report_geojson(report: &DarkStsReport, run_config: Option<&Value>) -> Value {
    let features: Vec<Value> = report
        .verdicts
        .iter()
        .map(|v| {
            let d = &v.detection;
            let deltas: Vec<Value> = v
                .draught_deltas
                .iter()
                .map(|(id, m)| json!({ "vessel_id": id.as_str(), "draught_change_m": m }))
                .collect();
            let ids: Vec<&str> = v.distinct_identities.iter().map(|i| i.as_str()).collect();
            json!({
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [d.geo_center.lon(), d.geo_center.lat()],
                },
                "properties": {
                    "scene_id": d.scene_id,
                    "class": d.label.as_str(),
                    "confidence": d.confidence,
                    "acquired_at": d.acquired_at.to_string(),
                    "bbox": [d.bbox.x0, d.bbox.y0, d.bbox.w, d.bbox.h],
                    "is_dark": v.is_dark,
                    "identities": ids,
                    "draught_deltas": deltas,
                    "window_start": v.evidence_window.0.to_string(),
                    "window_end": v.evidence_window.1.to_string(),
                },
            })
        })
        .collect();
    json!({
        "type": "FeatureCollection",
        "summary": dark_summary_json(report, run_config),
        "features": features,
    })
}

/// Writes `dark_report.geojson` and `dark_summary.json` into `dir`.
pub fn write_report(
    dir: &Path,
    report: &DarkStsReport,
    run_config: Option<&Value>,
) -> Result<(), DarkError> {
    let write = |name: &str, v: &Value| -> Result<(), DarkError> {
        let mut f = std::io::BufWriter::new(File::create(dir.join(name))?);
        serde_json::to_writer_pretty(&mut f, v).map_err(std::io::Error::from)?;
        f.write_all(b"\n")?;
        f.flush()?;
        Ok(())
    };
    write(
        "dark_report.geojson",
        &dark_report_geojson(report, run_config),
    )?;
    write("dark_summary.json", &dark_summary_json(report, run_config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::GeoPoint;
    use crate::time::Timestamp;

    fn scene() -> SceneMeta {
        SceneMeta::north_up(
            "S1",
            Timestamp(1_690_891_200),
            GeoPoint::new(45.3, 36.4).unwrap(),
            2_000,
            2_000,
            3.0,
            0.2,
        )
        .unwrap()
    }

    #[test]
    fn unknown_scene() {
        let csv = "scene_id,class_label,x0,y0,w,h,confidence\nS9,Cargo STS,1,1,10,10,0.9\n";
        assert!(matches!(
            read_detections(csv.as_bytes(), &[scene()]),
            Err(DarkError::MissingScene { row: 2, .. })
        ));
    }

    #[test]
    fn center_at_origin() {
        let csv = "scene_id,class_label,x0,y0,w,h,confidence\nS1,STS Tanker,0,0,0.5,0.5,0.5\n";
        let mut d = read_detections(csv.as_bytes(), &[scene()]).unwrap();
        // shift the box so its center is exactly pixel (0, 0)
        d[0].bbox = BBox {
            x0: -0.25,
            y0: -0.25,
            w: 0.5,
            h: 0.5,
        };
        let (cx, cy) = d[0].bbox.center();
        assert_eq!(scene().pixel_to_geo(cx, cy).unwrap(), scene().origin);
    }

    #[test]
    fn malformed_rows() {
        for row in [
            "S1,Cargo STS,1,1,10,10,1.5",
            "S1,Cargo STS,1995,1,10,10,0.9",
            "S1,Cargo STS,1,1,0,10,0.9",
            "S1,Dinghy,1,1,10,10,0.9",
            "S1,Cargo STS,x,1,10,10,0.9",
        ] {
            let csv = format!("scene_id,class_label,x0,y0,w,h,confidence\n{row}\n");
            assert!(
                matches!(
                    read_detections(csv.as_bytes(), &[scene()]),
                    Err(DarkError::MalformedRow { .. })
                ),
                "{row}"
            );
        }
    }

    #[test]
    fn round_trip() {
        let csv =
            "scene_id,class_label,x0,y0,w,h,confidence\nS1,VLCC,10.25,20.125,83.3,12.5,0.875\n";
        let d = read_detections(csv.as_bytes(), &[scene()]).unwrap();
        let mut buf = Vec::new();
        write_detections(&mut buf, &d).unwrap();
        assert_eq!(read_detections(buf.as_slice(), &[scene()]).unwrap(), d);
    }
}
