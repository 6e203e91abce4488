//! Vessel and transfer classification.
//!
//! Four named vessel classes come from deadweight bands per cargo family.
//! Bands left unnamed (dry 6,000–30,000 t, liquid 6,000–100,000 t) map to
//! `OtherDry` / `OtherLiquid` so pairs still classify by family. "Up to"
//! bounds are inclusive and "exceeding" bounds strict.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ais::{CargoFamily, VesselRecord};

pub const SMALL_CARRIER_MAX_DWT: f64 = 6_000.0;
pub const BULK_CARRIER_MIN_DWT: f64 = 30_000.0;
pub const VLCC_MIN_DWT: f64 = 100_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShipClass {
    GeneralCargo,
    BulkCarrier,
    Tanker,
    Vlcc,
    OtherDry,
    OtherLiquid,
    Unknown,
}

impl ShipClass {
    pub const ALL: [ShipClass; 7] = [
        ShipClass::GeneralCargo,
        ShipClass::BulkCarrier,
        ShipClass::Tanker,
        ShipClass::Vlcc,
        ShipClass::OtherDry,
        ShipClass::OtherLiquid,
        ShipClass::Unknown,
    ];

    pub fn family(self) -> CargoFamily {
        match self {
            ShipClass::GeneralCargo | ShipClass::BulkCarrier | ShipClass::OtherDry => {
                CargoFamily::Dry
            }
            ShipClass::Tanker | ShipClass::Vlcc | ShipClass::OtherLiquid => CargoFamily::Liquid,
            ShipClass::Unknown => CargoFamily::Other,
        }
    }

    /// Tile label for a lone vessel of this class, if the class is part of
    /// the six-class tile taxonomy.
    pub fn tile_label(self) -> Option<TileLabel> {
        match self {
            ShipClass::GeneralCargo => Some(TileLabel::GeneralCargo),
            ShipClass::BulkCarrier => Some(TileLabel::BulkCarrier),
            ShipClass::Tanker => Some(TileLabel::Tanker),
            ShipClass::Vlcc => Some(TileLabel::Vlcc),
            _ => None,
        }
    }
}

impl fmt::Display for ShipClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShipClass::GeneralCargo => "General Cargo",
            ShipClass::BulkCarrier => "Bulk Carrier",
            ShipClass::Tanker => "Tanker",
            ShipClass::Vlcc => "VLCC",
            ShipClass::OtherDry => "Other Dry",
            ShipClass::OtherLiquid => "Other Liquid",
            ShipClass::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StsClass {
    StsCargo,
    StsTanker,
    StsMixed,
}

impl StsClass {
    pub fn tile_label(self) -> Option<TileLabel> {
        match self {
            StsClass::StsCargo => Some(TileLabel::CargoSts),
            StsClass::StsTanker => Some(TileLabel::StsTanker),
            StsClass::StsMixed => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StsClass::StsCargo => "Cargo STS",
            StsClass::StsTanker => "STS Tanker",
            StsClass::StsMixed => "STS Mixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "Cargo STS" => Some(StsClass::StsCargo),
            "STS Tanker" => Some(StsClass::StsTanker),
            "STS Mixed" => Some(StsClass::StsMixed),
            _ => None,
        }
    }
}

impl fmt::Display for StsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The six classes used for training tiles and detector output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TileLabel {
    GeneralCargo,
    BulkCarrier,
    CargoSts,
    Tanker,
    StsTanker,
    Vlcc,
}

impl TileLabel {
    pub const ALL: [TileLabel; 6] = [
        TileLabel::GeneralCargo,
        TileLabel::BulkCarrier,
        TileLabel::CargoSts,
        TileLabel::Tanker,
        TileLabel::StsTanker,
        TileLabel::Vlcc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TileLabel::GeneralCargo => "General Cargo",
            TileLabel::BulkCarrier => "Bulk Carrier",
            TileLabel::CargoSts => "Cargo STS",
            TileLabel::Tanker => "Tanker",
            TileLabel::StsTanker => "STS Tanker",
            TileLabel::Vlcc => "VLCC",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        Self::ALL.into_iter().find(|l| l.as_str() == s)
    }

    pub fn is_sts(self) -> bool {
        matches!(self, TileLabel::CargoSts | TileLabel::StsTanker)
    }
}

impl fmt::Display for TileLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_vessel(v: &VesselRecord) -> ShipClass {
    classify_dwt(v.cargo_family, v.dwt)
}

pub fn classify_dwt(family: CargoFamily, dwt: f64) -> ShipClass {
    if dwt.is_nan() || dwt <= 0.0 {
        return ShipClass::Unknown;
    }
    match family {
        CargoFamily::Dry if dwt <= SMALL_CARRIER_MAX_DWT => ShipClass::GeneralCargo,
        CargoFamily::Dry if dwt > BULK_CARRIER_MIN_DWT => ShipClass::BulkCarrier,
        CargoFamily::Dry => ShipClass::OtherDry,
        CargoFamily::Liquid if dwt <= SMALL_CARRIER_MAX_DWT => ShipClass::Tanker,
        CargoFamily::Liquid if dwt > VLCC_MIN_DWT => ShipClass::Vlcc,
        CargoFamily::Liquid => ShipClass::OtherLiquid,
        CargoFamily::Other => ShipClass::Unknown,
    }
}

pub fn classify_sts(a: ShipClass, b: ShipClass) -> StsClass {
    match (a.family(), b.family()) {
        (CargoFamily::Dry, CargoFamily::Dry) => StsClass::StsCargo,
        (CargoFamily::Liquid, CargoFamily::Liquid) => StsClass::StsTanker,
        _ => StsClass::StsMixed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_examples() {
        assert_eq!(
            classify_dwt(CargoFamily::Liquid, 150_000.0),
            ShipClass::Vlcc
        );
        assert_eq!(
            classify_dwt(CargoFamily::Dry, 5_000.0),
            ShipClass::GeneralCargo
        );
        assert_eq!(
            classify_dwt(CargoFamily::Dry, 20_000.0),
            ShipClass::OtherDry
        );
        assert_eq!(
            classify_dwt(CargoFamily::Other, 50_000.0),
            ShipClass::Unknown
        );
        assert_eq!(classify_dwt(CargoFamily::Dry, 0.0), ShipClass::Unknown);
    }

    #[test]
    fn sts_pairs() {
        use ShipClass::*;
        assert_eq!(classify_sts(GeneralCargo, BulkCarrier), StsClass::StsCargo);
        assert_eq!(classify_sts(Tanker, Vlcc), StsClass::StsTanker);
        assert_eq!(classify_sts(GeneralCargo, Tanker), StsClass::StsMixed);
        assert_eq!(classify_sts(Unknown, Unknown), StsClass::StsMixed);
        assert_eq!(classify_sts(OtherDry, GeneralCargo), StsClass::StsCargo);
    }

    #[test]
    fn labels_round_trip() {
        for l in TileLabel::ALL {
            assert_eq!(TileLabel::parse(l.as_str()), Some(l));
        }
        assert_eq!(TileLabel::parse("STS Mixed"), None);
        assert_eq!(StsClass::StsMixed.tile_label(), None);
    }
}
