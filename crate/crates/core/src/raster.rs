//! Regular lat/lon raster shared by ASF maps and exported accuracy grids.

use alloc::string::String;
use alloc::vec::Vec;

use crate::geo::GeoPoint;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RasterError {
    #[error("label must be a non-empty token without whitespace")]
    BadLabel,
    #[error("cell size must be finite and positive")]
    BadCellSize,
    #[error("raster needs at least one node per axis")]
    Empty,
    #[error("expected {expected} values, got {actual}")]
    ValueCount { expected: usize, actual: usize },
    #[error("value at row {row}, column {col} is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("raster extent leaves the valid lat/lon range")]
    Extent,
}

/// Row-major lattice of optional values. Row 0 is the southernmost row and
/// column 0 the westernmost column; `None` marks NODATA.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    label: String,
    origin: GeoPoint,
    d_lat: f64,
    d_lon: f64,
    n_lat: usize,
    n_lon: usize,
    values: Vec<Option<f64>>,
}

impl Raster {
    pub fn new(
        label: impl Into<String>,
        origin: GeoPoint,
        d_lat: f64,
        d_lon: f64,
        n_lat: usize,
        n_lon: usize,
        values: Vec<Option<f64>>,
    ) -> Result<Self, RasterError> {
        let label = label.into();
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(RasterError::BadLabel);
        }
        if !(d_lat.is_finite() && d_lat > 0.0 && d_lon.is_finite() && d_lon > 0.0) {
            return Err(RasterError::BadCellSize);
        }
        if n_lat == 0 || n_lon == 0 {
            return Err(RasterError::Empty);
        }
        let expected = n_lat * n_lon;
        if values.len() != expected {
            return Err(RasterError::ValueCount {
                expected,
                actual: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| matches!(v, Some(x) if !x.is_finite())) {
            return Err(RasterError::NonFinite {
                row: k / n_lon,
                col: k % n_lon,
            });
        }
        let top = origin.lat() + (n_lat - 1) as f64 * d_lat;
        let right = origin.lon() + (n_lon - 1) as f64 * d_lon;
        if GeoPoint::new(top, right).is_err() {
            return Err(RasterError::Extent);
        }
        Ok(Self {
            label,
            origin,
            d_lat,
            d_lon,
            n_lat,
            n_lon,
            values,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn origin(&self) -> GeoPoint {
        self.origin
    }

    pub fn d_lat(&self) -> f64 {
        self.d_lat
    }

    pub fn d_lon(&self) -> f64 {
        self.d_lon
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.values[row * self.n_lon + col]
    }

    /// Position of node `(row, col)`.
    pub fn node_point(&self, row: usize, col: usize) -> GeoPoint {
        let lat = self.origin.lat() + row as f64 * self.d_lat;
        let lon = self.origin.lon() + col as f64 * self.d_lon;
        // in range by construction
        GeoPoint::new(lat.min(90.0), lon).expect("node inside validated extent")
    }
}
