//! Synthetic ASF maps: constant, linear gradient, and Gaussian bump.

use alloc::string::String;
use alloc::vec::Vec;

use libm::exp;

use crate::asf_map::{AsfMap, AsfMapError};
use crate::geo::GeoPoint;
use crate::raster::Raster;

/// Lattice of a synthetic map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthGrid {
    pub origin: GeoPoint,
    pub d_lat: f64,
    pub d_lon: f64,
    pub n_lat: usize,
    pub n_lon: usize,
}

/// Field shapes in microseconds. Gradients are per degree, measured from the
/// map origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    Constant {
        offset_us: f64,
    },
    Gradient {
        offset_us: f64,
        per_deg_lat: f64,
        per_deg_lon: f64,
    },
    Bump {
        offset_us: f64,
        amplitude_us: f64,
        center: GeoPoint,
        sigma_deg: f64,
    },
}

impl SynthKind {
    /// Field value at `(dlat, dlon)` degrees from the origin.
    fn value(&self, origin: GeoPoint, dlat: f64, dlon: f64) -> f64 {
        match *self {
            Self::Constant { offset_us } => offset_us,
            Self::Gradient {
                offset_us,
                per_deg_lat,
                per_deg_lon,
            } => offset_us + per_deg_lat * dlat + per_deg_lon * dlon,
            Self::Bump {
                offset_us,
                amplitude_us,
                center,
                sigma_deg,
            } => {
                let y = origin.lat() + dlat - center.lat();
                let x = origin.lon() + dlon - center.lon();
                offset_us + amplitude_us * exp(-(x * x + y * y) / (2.0 * sigma_deg * sigma_deg))
            }
        }
    }
}

pub fn synthesize(station_id: impl Into<String>, grid: &SynthGrid, kind: &SynthKind) -> Result<AsfMap, AsfMapError> {
    let mut values = Vec::with_capacity(grid.n_lat * grid.n_lon);
    for i in 0..grid.n_lat {
        for j in 0..grid.n_lon {
            let v = kind.value(grid.origin, i as f64 * grid.d_lat, j as f64 * grid.d_lon);
            values.push(Some(v));
        }
    }
    let raster = Raster::new(
        station_id,
        grid.origin,
        grid.d_lat,
        grid.d_lon,
        grid.n_lat,
        grid.n_lon,
        values,
    )?;
    AsfMap::try_from(raster)
}
