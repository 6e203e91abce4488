//! AIS ingestion: NMEA `!AIVDM` decoding, tabular position dumps, the
//! static vessel registry, and grouping of fixes into per-vessel tracks.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::GeoPoint;
use crate::time::Timestamp;

pub mod nmea;
mod table;
mod tracks;

pub use table::{
    load_position_table, load_position_table_with, load_registry, read_position_table,
    read_registry, write_position_table, write_registry, PositionTable, Registry,
};
pub use tracks::{build_tracks, Track};

pub(crate) use table::find_column as table_find_column;

/// Highest speed-over-ground encodable in a position report, knots.
pub const MAX_SOG_KN: f64 = 102.2;
/// Deepest draught accepted on a fix, meters.
pub const MAX_DRAUGHT_M: f64 = 30.0;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),
    #[error("file has no header row")]
    EmptyFile,
}

/// Opaque vessel identity token (MMSI or IMO-derived).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VesselId(Arc<str>);

impl VesselId {
    pub fn new(id: impl AsRef<str>) -> Self {
        Self(Arc::from(id.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for VesselId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for VesselId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VesselId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FixError {
    #[error("speed over ground {0} kn outside [0, {MAX_SOG_KN}]")]
    Sog(f64),
    #[error("draught {0} m outside (0, {MAX_DRAUGHT_M}]")]
    Draught(f64),
}

/// One timestamped AIS position report.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionFix {
    pub vessel_id: VesselId,
    pub t: Timestamp,
    pub pos: GeoPoint,
    /// Knots.
    pub sog: f64,
    /// Meters.
    pub draught: Option<f64>,
}

impl PositionFix {
    pub fn new(
        vessel_id: VesselId,
        t: Timestamp,
        pos: GeoPoint,
        sog: f64,
        draught: Option<f64>,
    ) -> Result<Self, FixError> {
        if !(0.0..=MAX_SOG_KN).contains(&sog) {
            return Err(FixError::Sog(sog));
        }
        if let Some(d) = draught {
            if !(d > 0.0 && d <= MAX_DRAUGHT_M) {
                return Err(FixError::Draught(d));
            }
        }
        Ok(Self {
            vessel_id,
            t,
            pos,
            sog,
            draught,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CargoFamily {
    Dry,
    Liquid,
    Other,
}

impl CargoFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            CargoFamily::Dry => "Dry",
            CargoFamily::Liquid => "Liquid",
            CargoFamily::Other => "Other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dry" => Some(CargoFamily::Dry),
            "liquid" => Some(CargoFamily::Liquid),
            "other" => Some(CargoFamily::Other),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecordError {
    #[error("IMO number {0} fails the check-digit rule")]
    ImoCheckDigit(u32),
    #[error("length {0} m outside (10, 500]")]
    Length(f64),
    #[error("beam {beam} m not below length {length} m")]
    Beam { beam: f64, length: f64 },
    #[error("deadweight {0} t is negative")]
    Dwt(f64),
}

/// Static registry entry for one vessel.
#[derive(Debug, Clone, PartialEq)]
pub struct VesselRecord {
    pub vessel_id: VesselId,
    pub imo: Option<u32>,
    pub name: String,
    pub length_m: f64,
    pub beam_m: f64,
    pub dwt: f64,
    pub cargo_family: CargoFamily,
}

impl VesselRecord {
    pub fn validate(&self) -> Result<(), RecordError> {
        if let Some(imo) = self.imo {
            if !imo_check_digit_ok(imo) {
                return Err(RecordError::ImoCheckDigit(imo));
            }
        }
        if !(self.length_m > 10.0 && self.length_m <= 500.0) {
            return Err(RecordError::Length(self.length_m));
        }
        if !(self.beam_m > 0.0 && self.beam_m < self.length_m) {
            return Err(RecordError::Beam {
                beam: self.beam_m,
                length: self.length_m,
            });
        }
        if self.dwt.is_nan() || self.dwt < 0.0 {
            return Err(RecordError::Dwt(self.dwt));
        }
        Ok(())
    }

    /// Stand-in record for a vessel seen on AIS but absent from the registry.
    /// Dimensions are unknown and reported as zero.
    pub fn unregistered(vessel_id: VesselId) -> Self {
        Self {
            vessel_id,
            imo: None,
            name: String::new(),
            length_m: 0.0,
            beam_m: 0.0,
            dwt: 0.0,
            cargo_family: CargoFamily::Other,
        }
    }
}

/// IMO numbers are seven digits; the last is the sum of the first six
/// weighted 7..2, mod 10.
pub fn imo_check_digit_ok(imo: u32) -> bool {
    if !(1_000_000..=9_999_999).contains(&imo) {
        return false;
    }
    let digits: Vec<u32> = imo
        .to_string()
        .bytes()
        .map(|b| u32::from(b - b'0'))
        .collect();
    let sum: u32 = digits[..6]
        .iter()
        .zip((2..=7).rev())
        .map(|(d, w)| d * w)
        .sum();
    sum % 10 == digits[6]
}
