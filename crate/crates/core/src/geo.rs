//! Spherical-earth geodesy: great-circle distance, local tangent-plane
//! offsets and polygon containment.
//!
//! All distances are in meters on a sphere of mean radius
//! [`EARTH_RADIUS_M`]. At the 500 m decision thresholds used by the
//! detectors the error against the WGS84 ellipsoid stays below 0.5%.

use std::fmt;

use thiserror::Error;

/// Mean earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Meters per degree of arc on the [`EARTH_RADIUS_M`] sphere.
pub const METERS_PER_DEGREE: f64 = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;

/// Largest offset for which the tangent-plane approximation is accepted.
pub const MAX_LOCAL_OFFSET_M: f64 = 100_000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("latitude {0} outside [-90, 90]")]
    InvalidLatitude(f64),
    #[error("longitude {0} is not finite")]
    InvalidLongitude(f64),
    #[error("point is {distance_m:.0} m from the origin, beyond the {MAX_LOCAL_OFFSET_M} m tangent-plane limit")]
    OutOfRange { distance_m: f64 },
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(&'static str),
}

/// A WGS84 position in degrees. Longitude is normalized to `[-180, 180)`
/// on construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(GeoError::InvalidLatitude(lat));
        }
        if !lon.is_finite() {
            return Err(GeoError::InvalidLongitude(lon));
        }
        Ok(Self {
            lat,
            lon: normalize_lon(lon),
        })
    }

    #[inline]
    pub fn lat(&self) -> f64 {
        self.lat
    }

    #[inline]
    pub fn lon(&self) -> f64 {
        self.lon
    }
}

impl fmt::Display for GeoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:.6})", self.lat, self.lon)
    }
}

/// Wraps a finite longitude into `[-180, 180)`.
pub fn normalize_lon(lon: f64) -> f64 {
    if (-180.0..180.0).contains(&lon) {
        return lon;
    }
    let wrapped = (lon + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}

/// Signed longitude difference `to - from`, wrapped into `[-180, 180)`.
#[inline]
pub fn lon_delta(from: f64, to: f64) -> f64 {
    normalize_lon(to - from)
}

/// Great-circle distance in meters (haversine form).
pub fn haversine_distance(a: GeoPoint, b: GeoPoint) -> f64 {
    let phi1 = a.lat.to_radians();
    let phi2 = b.lat.to_radians();
    let dphi = (b.lat - a.lat).to_radians();
    let dlambda = (b.lon - a.lon).to_radians();
    let s1 = (dphi * 0.5).sin();
    let s2 = (dlambda * 0.5).sin();
    let h = s1 * s1 + phi1.cos() * phi2.cos() * (s2 * s2);
    2.0 * EARTH_RADIUS_M * h.clamp(0.0, 1.0).sqrt().asin()
}

/// East/north displacement in meters on the tangent plane at some origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalOffset {
    pub east: f64,
    pub north: f64,
}

impl LocalOffset {
    pub fn new(east: f64, north: f64) -> Self {
        Self { east, north }
    }

    pub fn magnitude(&self) -> f64 {
        self.east.hypot(self.north)
    }
}

/// Equirectangular projection of `p` onto the tangent plane at `origin`.
pub fn local_offset(origin: GeoPoint, p: GeoPoint) -> Result<LocalOffset, GeoError> {
    let distance_m = haversine_distance(origin, p);
    if distance_m >= MAX_LOCAL_OFFSET_M {
        return Err(GeoError::OutOfRange { distance_m });
    }
    Ok(local_offset_unchecked(origin, p))
}

/// [`local_offset`] without the range check; callers guarantee proximity.
#[inline]
pub(crate) fn local_offset_unchecked(origin: GeoPoint, p: GeoPoint) -> LocalOffset {
    let east = lon_delta(origin.lon, p.lon) * origin.lat.to_radians().cos() * METERS_PER_DEGREE;
    let north = (p.lat - origin.lat) * METERS_PER_DEGREE;
    LocalOffset { east, north }
}

/// Inverse of [`local_offset`].
pub fn offset_to_geo(offset: LocalOffset, origin: GeoPoint) -> Result<GeoPoint, GeoError> {
    let lat = origin.lat + offset.north / METERS_PER_DEGREE;
    let lon = origin.lon + offset.east / (METERS_PER_DEGREE * origin.lat.to_radians().cos());
    GeoPoint::new(lat, lon)
}

/// Ray-casting containment over a lon/lat polygon. Points on an edge or
/// vertex count as inside. A trailing vertex equal to the first is ignored.
pub fn point_in_footprint(p: GeoPoint, footprint: &[GeoPoint]) -> Result<bool, GeoError> {
    let ring = open_ring(footprint);
    if ring.len() < 3 {
        return Err(GeoError::DegeneratePolygon("fewer than 3 vertices"));
    }
    if signed_area(ring) == 0.0 {
        return Err(GeoError::DegeneratePolygon("zero area"));
    }

    let (px, py) = (p.lon, p.lat);
    let mut inside = false;
    let n = ring.len();
    for i in 0..n {
        let (ax, ay) = (ring[i].lon, ring[i].lat);
        let (bx, by) = (ring[(i + 1) % n].lon, ring[(i + 1) % n].lat);
        if on_segment(px, py, ax, ay, bx, by) {
            return Ok(true);
        }
        if (ay > py) != (by > py) {
            let x_cross = ax + (py - ay) * (bx - ax) / (by - ay);
            if px < x_cross {
                inside = !inside;
            }
        }
    }
    Ok(inside)
}

fn open_ring(poly: &[GeoPoint]) -> &[GeoPoint] {
    match poly {
        [first, .., last] if poly.len() > 3 && first == last => &poly[..poly.len() - 1],
        _ => poly,
    }
}

/// Shoelace area in squared degrees; sign follows winding.
pub(crate) fn signed_area(ring: &[GeoPoint]) -> f64 {
    let n = ring.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            a.lon * b.lat - b.lon * a.lat
        })
        .sum();
    twice * 0.5
}

fn on_segment(px: f64, py: f64, ax: f64, ay: f64, bx: f64, by: f64) -> bool {
    const EPS: f64 = 1e-12;
    let cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    let scale = (bx - ax).abs().max((by - ay).abs()).max(1.0);
    if cross.abs() > EPS * scale {
        return false;
    }
    px >= ax.min(bx) - EPS
        && px <= ax.max(bx) + EPS
        && py >= ay.min(by) - EPS
        && py <= ay.max(by) + EPS
}

/// Axis-aligned lon/lat bounds of a polygon: `(min_lat, min_lon, max_lat, max_lon)`.
pub fn bounding_box(poly: &[GeoPoint]) -> Option<(f64, f64, f64, f64)> {
    let first = poly.first()?;
    Some(poly.iter().fold(
        (first.lat, first.lon, first.lat, first.lon),
        |(a, b, c, d), p| (a.min(p.lat), b.min(p.lon), c.max(p.lat), d.max(p.lon)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn lon_normalized_at_construction() {
        assert_eq!(pt(0.0, 180.0).lon(), -180.0);
        assert_eq!(pt(0.0, 190.0).lon(), -170.0);
        assert_eq!(pt(0.0, -190.0).lon(), 170.0);
        assert_eq!(pt(0.0, 540.0).lon(), -180.0);
        assert!(GeoPoint::new(90.5, 0.0).is_err());
        assert!(GeoPoint::new(f64::NAN, 0.0).is_err());
        assert!(GeoPoint::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn haversine_identity_and_antipode() {
        let p = pt(45.25, 36.5);
        assert_eq!(haversine_distance(p, p), 0.0);
        let d = haversine_distance(pt(0.0, 0.0), pt(0.0, 180.0));
        assert!((d - std::f64::consts::PI * EARTH_RADIUS_M).abs() < 1e-6);
        assert!((d - 20_015_114.442).abs() < 1e-2);
    }

    #[test]
    fn haversine_kerch_500m() {
        // 40-digit reference from an arbitrary-precision evaluation of both
        // the haversine and spherical-law-of-cosines forms: 501.011032006038.
        let d = haversine_distance(pt(45.25, 36.50), pt(45.25, 36.5064));
        assert!((d - 501.011_032_006_038_4).abs() < 1e-6, "{d}");
    }

    #[test]
    fn offset_examples() {
        let o = pt(45.0, 36.0);
        assert_eq!(local_offset(o, o).unwrap(), LocalOffset::new(0.0, 0.0));
        let north = pt(45.0 + 500.0 / METERS_PER_DEGREE, 36.0);
        let off = local_offset(o, north).unwrap();
        assert!(off.east.abs() < 1e-12);
        assert!((off.north - 500.0).abs() < 1e-9);
        assert!(matches!(
            local_offset(o, pt(46.0, 36.0)),
            Err(GeoError::OutOfRange { .. })
        ));
    }

    #[test]
    fn offset_across_antimeridian() {
        let o = pt(10.0, 179.999);
        let p = pt(10.0, -179.999);
        let off = local_offset(o, p).unwrap();
        assert!(off.east > 0.0 && off.east < 300.0);
        let back = offset_to_geo(off, o).unwrap();
        assert!((back.lon() - p.lon()).abs() < 1e-9);
    }

    fn square() -> Vec<GeoPoint> {
        vec![
            pt(45.0, 36.0),
            pt(45.0, 37.0),
            pt(46.0, 37.0),
            pt(46.0, 36.0),
        ]
    }

    #[test]
    fn footprint_containment() {
        let sq = square();
        assert!(point_in_footprint(pt(45.5, 36.5), &sq).unwrap());
        assert!(!point_in_footprint(pt(47.0, 36.5), &sq).unwrap());
        assert!(!point_in_footprint(pt(45.5, 38.0), &sq).unwrap());
        for v in &sq {
            assert!(point_in_footprint(*v, &sq).unwrap());
        }
        assert!(point_in_footprint(pt(45.0, 36.5), &sq).unwrap());
        let mut closed = sq.clone();
        closed.push(sq[0]);
        assert!(point_in_footprint(pt(45.5, 36.5), &closed).unwrap());
    }

    #[test]
    fn footprint_degenerate() {
        let two = vec![pt(45.0, 36.0), pt(45.0, 37.0)];
        assert!(matches!(
            point_in_footprint(pt(45.0, 36.5), &two),
            Err(GeoError::DegeneratePolygon(_))
        ));
        let flat = vec![pt(45.0, 36.0), pt(45.0, 37.0), pt(45.0, 38.0)];
        assert!(matches!(
            point_in_footprint(pt(45.0, 36.5), &flat),
            Err(GeoError::DegeneratePolygon(_))
        ));
    }

    fn any_point() -> impl Strategy<Value = GeoPoint> {
        (-89.9f64..89.9, -180.0f64..180.0).prop_map(|(la, lo)| pt(la, lo))
    }

    proptest! {
        #[test]
        fn metric_axioms(a in any_point(), b in any_point(), c in any_point()) {
            let ab = haversine_distance(a, b);
            prop_assert_eq!(ab, haversine_distance(b, a));
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(haversine_distance(a, a), 0.0);
            let ac = haversine_distance(a, c);
            let bc = haversine_distance(b, c);
            prop_assert!(ac <= ab + bc + 1e-6);
        }

        #[test]
        fn offset_magnitude_tracks_haversine(
            lat in -60.0f64..60.0, lon in -180.0f64..180.0,
            bearing in 0.0f64..std::f64::consts::TAU, dist in 1.0f64..1_000.0,
        ) {
            let o = pt(lat, lon);
            let p = offset_to_geo(LocalOffset::new(dist * bearing.sin(), dist * bearing.cos()), o).unwrap();
            let h = haversine_distance(o, p);
            let m = local_offset(o, p).unwrap().magnitude();
            prop_assert!((m - h).abs() / h < 1e-4, "m={} h={}", m, h);
        }

        #[test]
        fn offset_round_trip_10km(
            lat in -80.0f64..80.0, lon in -180.0f64..180.0,
            east in -7_000.0f64..7_000.0, north in -7_000.0f64..7_000.0,
        ) {
            let o = pt(lat, lon);
            let p = offset_to_geo(LocalOffset::new(east, north), o).unwrap();
            let back = offset_to_geo(local_offset(o, p).unwrap(), o).unwrap();
            prop_assert!((back.lat() - p.lat()).abs() < 1e-9);
            prop_assert!(lon_delta(back.lon(), p.lon()).abs() < 1e-9);
        }
    }
}
