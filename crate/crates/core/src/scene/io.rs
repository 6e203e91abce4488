use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use super::{PixelWindow, SceneError, SceneMeta, TileRecord};
use crate::ais::VesselId;
use crate::classify::TileLabel;
use crate::geo::GeoPoint;
use crate::time::Timestamp;

const SCENE_COLUMNS: [&str; 9] = [
    "scene_id",
    "acquired_at",
    "origin_lat",
    "origin_lon",
    "width",
    "height",
    "resolution",
    "cloud_score",
    "footprint_wkt",
];

const TILE_COLUMNS: [&str; 10] = [
    "scene_id",
    "label",
    "x0",
    "y0",
    "w",
    "h",
    "center_lat",
    "center_lon",
    "vessels",
    "ais_time_delta_s",
];

/// `POLYGON ((lon lat, lon lat, ...))`, ring closed.
pub fn to_wkt_polygon(ring: &[GeoPoint]) -> String {
    let mut pts: Vec<String> = ring
        .iter()
        .map(|p| format!("{} {}", p.lon(), p.lat()))
        .collect();
    if let Some(first) = ring.first() {
        if ring.last() != Some(first) {
            pts.push(format!("{} {}", first.lon(), first.lat()));
        }
    }
    format!("POLYGON (({}))", pts.join(", "))
}

/// Parses the outer ring of a WKT `POLYGON`. The closing vertex is dropped.
pub fn parse_wkt_polygon(wkt: &str) -> Option<Vec<GeoPoint>> {
    let s = wkt.trim();
    let rest = s
        .get(..7)?
        .eq_ignore_ascii_case("POLYGON")
        .then(|| &s[7..])?;
    let rest = rest
        .trim()
        .strip_prefix('(')?
        .trim_start()
        .strip_prefix('(')?;
    let ring = &rest[..rest.find(')')?];
    let mut pts = ring
        .split(',')
        .map(|pair| {
            let mut it = pair.split_whitespace();
            let lon: f64 = it.next()?.parse().ok()?;
            let lat: f64 = it.next()?.parse().ok()?;
            GeoPoint::new(lat, lon).ok()
        })
        .collect::<Option<Vec<_>>>()?;
    if pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    Some(pts)
}

pub fn load_scenes(path: &Path) -> Result<Vec<SceneMeta>, SceneError> {
    read_scenes(BufReader::new(File::open(path)?))
}

pub fn read_scenes<R: Read>(reader: R) -> Result<Vec<SceneMeta>, SceneError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = SCENE_COLUMNS
        .iter()
        .map(|c| crate::ais::table_find_column(&headers, c).ok_or(SceneError::MissingColumn(c)))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let bad = |what: &str| SceneError::Malformed {
            row,
            reason: format!("bad {what}"),
        };
        let f = |k: usize| rec.get(idx[k]).map(str::trim).unwrap_or("");
        let num = |k: usize| f(k).parse::<f64>().map_err(|_| bad(SCENE_COLUMNS[k]));
        let int = |k: usize| f(k).parse::<u32>().map_err(|_| bad(SCENE_COLUMNS[k]));
        let scene = SceneMeta {
            scene_id: f(0).to_owned(),
            acquired_at: Timestamp::parse(f(1)).map_err(|_| bad("acquired_at"))?,
            origin: GeoPoint::new(num(2)?, num(3)?).map_err(|_| bad("origin"))?,
            width: int(4)?,
            height: int(5)?,
            resolution_m: num(6)?,
            cloud_score: num(7)?,
            footprint: parse_wkt_polygon(f(8)).ok_or_else(|| bad("footprint_wkt"))?,
        };
        if scene.scene_id.is_empty() {
            return Err(bad("scene_id"));
        }
        scene.validate()?;
        out.push(scene);
    }
    Ok(out)
}

pub fn write_scenes<W: Write>(writer: W, scenes: &[SceneMeta]) -> Result<(), SceneError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SCENE_COLUMNS)?;
    for s in scenes {
        w.write_record([
            s.scene_id.as_str(),
            &s.acquired_at.to_string(),
            &s.origin.lat().to_string(),
            &s.origin.lon().to_string(),
            &s.width.to_string(),
            &s.height.to_string(),
            &s.resolution_m.to_string(),
            &s.cloud_score.to_string(),
            &to_wkt_polygon(&s.footprint),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_tiles_manifest<W: Write>(writer: W, tiles: &[TileRecord]) -> Result<(), SceneError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TILE_COLUMNS)?;
    for t in tiles {
        let vessels: Vec<&str> = t.vessels.iter().map(VesselId::as_str).collect();
        w.write_record([
            t.scene_id.as_str(),
            t.label.as_str(),
            &t.window.x0.to_string(),
            &t.window.y0.to_string(),
            &t.window.w.to_string(),
            &t.window.h.to_string(),
            &t.center.lat().to_string(),
            &t.center.lon().to_string(),
            &vessels.join(";"),
            &t.ais_time_delta_s.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a manifest back. Tile extent is not stored and comes back as
/// `extent_m`.
pub fn read_tiles_manifest<R: Read>(
    reader: R,
    extent_m: f64,
) -> Result<Vec<TileRecord>, SceneError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let bad = |what: &str| SceneError::Malformed {
            row,
            reason: format!("bad {what}"),
        };
        if rec.len() != TILE_COLUMNS.len() {
            return Err(bad("column count"));
        }
        let int = |k: usize| rec[k].parse::<u32>().map_err(|_| bad(TILE_COLUMNS[k]));
        let num = |k: usize| rec[k].parse::<f64>().map_err(|_| bad(TILE_COLUMNS[k]));
        out.push(TileRecord {
            scene_id: rec[0].to_owned(),
            label: TileLabel::parse(&rec[1]).ok_or_else(|| bad("label"))?,
            window: PixelWindow {
                x0: int(2)?,
                y0: int(3)?,
                w: int(4)?,
                h: int(5)?,
            },
            center: GeoPoint::new(num(6)?, num(7)?).map_err(|_| bad("center"))?,
            vessels: rec[8]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(VesselId::new)
                .collect(),
            ais_time_delta_s: rec[9].parse().map_err(|_| bad("ais_time_delta_s"))?,
            extent_m,
        });
    }
    Ok(out)
}
