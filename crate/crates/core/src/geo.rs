//! Spherical-earth geodesy and the positioning geometry matrix.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use libm::{asin, atan2, cos, sin, sqrt};

/// Mean earth radius used when no override is configured.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Stations closer than this to the receiver leave the bearing undefined.
pub const MIN_STATION_RANGE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum GeoError {
    #[error("invalid coordinate: lat must be finite in [-90, 90], lon finite in [-180, 180)")]
    InvalidCoordinate,
    #[error("station {index} lies within {min_range_m} m of the receiver", min_range_m = MIN_STATION_RANGE_M)]
    StationTooClose { index: usize },
    #[error("at least 3 stations are required, got {0}")]
    InsufficientStations(usize),
    #[error("earth radius must be finite and positive")]
    InvalidRadius,
}

/// Geographic position in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        let lat_ok = lat.is_finite() && (-90.0..=90.0).contains(&lat);
        let lon_ok = lon.is_finite() && (-180.0..180.0).contains(&lon);
        if lat_ok && lon_ok {
            Ok(Self { lat, lon })
        } else {
            Err(GeoError::InvalidCoordinate)
        }
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

/// A spherical earth of fixed radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    radius_m: f64,
}

impl Default for Sphere {
    fn default() -> Self {
        Self {
            radius_m: EARTH_RADIUS_M,
        }
    }
}

impl Sphere {
    pub fn new(radius_m: f64) -> Result<Self, GeoError> {
        if radius_m.is_finite() && radius_m > 0.0 {
            Ok(Self { radius_m })
        } else {
            Err(GeoError::InvalidRadius)
        }
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    /// Great-circle range in meters (haversine) and initial bearing in
    /// radians clockwise from north, in `[0, 2π)`.
    ///
    /// Identical points give `(0, 0)`. At the poles, where the forward
    /// azimuth is undefined, the bearing is 0.
    pub fn range_bearing(&self, a: GeoPoint, b: GeoPoint) -> (f64, f64) {
        let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
        let d_phi = phi2 - phi1;
        let d_lambda = (b.lon - a.lon).to_radians();

        let s_phi = sin(d_phi / 2.0);
        let s_lambda = sin(d_lambda / 2.0);
        let h = s_phi * s_phi + cos(phi1) * cos(phi2) * s_lambda * s_lambda;
        let range = 2.0 * self.radius_m * asin(sqrt(h.min(1.0)));

        if range == 0.0 || a.lat.abs() == 90.0 {
            return (range, 0.0);
        }
        let y = sin(d_lambda) * cos(phi2);
        let x = cos(phi1) * sin(phi2) - sin(phi1) * cos(phi2) * cos(d_lambda);
        (range, normalize_bearing(atan2(y, x)))
    }

    pub fn range(&self, a: GeoPoint, b: GeoPoint) -> f64 {
        self.range_bearing(a, b).0
    }
}

fn normalize_bearing(theta: f64) -> f64 {
    let t = if theta < 0.0 { theta + TAU } else { theta };
    // a tiny negative angle rounds up to exactly 2π
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// [`Sphere::range_bearing`] on the default earth.
pub fn geodesic_range_bearing(a: GeoPoint, b: GeoPoint) -> (f64, f64) {
    Sphere::default().range_bearing(a, b)
}

/// Linearized observation matrix. Row `i` is `[-e_east, -e_north, 1]` for
/// the unit vector pointing from the receiver to station `i`; the ones
/// column carries the receiver clock bias.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryMatrix {
    rows: Vec<[f64; 3]>,
}

impl GeometryMatrix {
    /// Builds rows directly from bearings (radians clockwise from north).
    pub fn from_bearings(bearings: &[f64]) -> Result<Self, GeoError> {
        if bearings.len() < 3 {
            return Err(GeoError::InsufficientStations(bearings.len()));
        }
        let rows = bearings.iter().map(|&theta| [-sin(theta), -cos(theta), 1.0]).collect();
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Builds the geometry matrix for a receiver at `rx`, one row per station in
/// input order.
pub fn build_geometry_matrix(sphere: &Sphere, rx: GeoPoint, stations: &[GeoPoint]) -> Result<GeometryMatrix, GeoError> {
    if stations.len() < 3 {
        return Err(GeoError::InsufficientStations(stations.len()));
    }
    let mut bearings = Vec::with_capacity(stations.len());
    for (index, &station) in stations.iter().enumerate() {
        let (range, bearing) = sphere.range_bearing(rx, station);
        if range < MIN_STATION_RANGE_M {
            return Err(GeoError::StationTooClose { index });
        }
        bearings.push(bearing);
    }
    GeometryMatrix::from_bearings(&bearings)
}
