//! Per-station spatial ASF rasters: bilinear sampling and reference-node
//! extraction.

use crate::geo::{GeoPoint, Sphere};
use crate::raster::{Raster, RasterError};

/// Sanity bound on stored ASF delays, in microseconds.
pub const ASF_BOUND_US: f64 = 100.0;

/// Fractional-index distance within which a point is treated as lying on a
/// grid line.
const SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AsfMapError {
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("ASF map needs at least 2 nodes per axis, got {n_lat}x{n_lon}")]
    TooSmall { n_lat: usize, n_lon: usize },
    #[error("ASF value {value} us at row {row}, column {col} is outside +/-{ASF_BOUND_US} us")]
    OutOfBounds { row: usize, col: usize, value: f64 },
    #[error("ASF map has no valid nodes")]
    NoData,
}

/// Spatial ASF delay in microseconds for one station. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct AsfMap {
    raster: Raster,
}

impl TryFrom<Raster> for AsfMap {
    type Error = AsfMapError;

    fn try_from(raster: Raster) -> Result<Self, Self::Error> {
        let (n_lat, n_lon) = (raster.n_lat(), raster.n_lon());
        if n_lat < 2 || n_lon < 2 {
            return Err(AsfMapError::TooSmall { n_lat, n_lon });
        }
        for (k, v) in raster.values().iter().enumerate() {
            if let Some(value) = *v {
                if value.abs() > ASF_BOUND_US {
                    return Err(AsfMapError::OutOfBounds {
                        row: k / n_lon,
                        col: k % n_lon,
                        value,
                    });
                }
            }
        }
        Ok(Self { raster })
    }
}

impl AsfMap {
    pub fn station_id(&self) -> &str {
        self.raster.label()
    }

    pub fn raster(&self) -> &Raster {
        &self.raster
    }

    pub fn into_raster(self) -> Raster {
        self.raster
    }

    /// Bilinear interpolation over the enclosing cell.
    ///
    /// Returns `None` outside the raster or when any corner carrying
    /// non-zero weight is NODATA. Points on a node return that node's value
    /// exactly.
    pub fn interpolate(&self, p: GeoPoint) -> Option<f64> {
        let r = &self.raster;
        let fi = (p.lat() - r.origin().lat()) / r.d_lat();
        let fj = (p.lon() - r.origin().lon()) / r.d_lon();
        let (i0, t) = cell_coord(fi, r.n_lat())?;
        let (j0, u) = cell_coord(fj, r.n_lon())?;

        let corners = [
            (i0, j0, (1.0 - t) * (1.0 - u)),
            (i0, j0 + 1, (1.0 - t) * u),
            (i0 + 1, j0, t * (1.0 - u)),
            (i0 + 1, j0 + 1, t * u),
        ];
        let mut acc = 0.0;
        for (i, j, w) in corners {
            if w != 0.0 {
                acc += w * r.get(i, j)?;
            }
        }
        Some(acc)
    }

    /// Indices of the valid node nearest to `p` by great-circle distance.
    /// Ties (within 1e-9 m) go to the lower row, then the lower column.
    pub fn nearest_valid_node(&self, sphere: &Sphere, p: GeoPoint) -> Option<(usize, usize)> {
        let r = &self.raster;
        let mut best: Option<((usize, usize), f64)> = None;
        for i in 0..r.n_lat() {
            for j in 0..r.n_lon() {
                if r.get(i, j).is_none() {
                    continue;
                }
                let d = sphere.range(p, r.node_point(i, j));
                match best {
                    Some((_, bd)) if d >= bd - 1e-9 => {}
                    _ => best = Some(((i, j), d)),
                }
            }
        }
        best.map(|(ij, _)| ij)
    }

    /// Value at the valid node nearest to `ref_point`. No interpolation.
    pub fn reference_value(&self, sphere: &Sphere, ref_point: GeoPoint) -> Result<f64, AsfMapError> {
        let (i, j) = self.nearest_valid_node(sphere, ref_point).ok_or(AsfMapError::NoData)?;
        Ok(self.raster.get(i, j).expect("nearest node is valid"))
    }
}

/// Splits a fractional index into `(lower node, fraction)` with the lower
/// node clamped so that `lower + 1` stays in range.
fn cell_coord(f: f64, n: usize) -> Option<(usize, f64)> {
    let last = (n - 1) as f64;
    if !(f >= -SNAP && f <= last + SNAP) {
        return None;
    }
    let rounded = libm::round(f);
    let f = if (f - rounded).abs() <= SNAP { rounded } else { f };
    let f = f.clamp(0.0, last);
    let lower = (libm::floor(f) as usize).min(n - 2);
    Some((lower, f - lower as f64))
}

/// Free-function form of [`AsfMap::interpolate`].
pub fn interpolate_asf(map: &AsfMap, p: GeoPoint) -> Option<f64> {
    map.interpolate(p)
}

/// Free-function form of [`AsfMap::reference_value`].
pub fn reference_asf(map: &AsfMap, sphere: &Sphere, ref_point: GeoPoint) -> Result<f64, AsfMapError> {
    map.reference_value(sphere, ref_point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    fn map(n_lat: usize, n_lon: usize, values: Vec<Option<f64>>) -> AsfMap {
        let r = Raster::new("TEST", p(35.0, 126.0), 0.5, 0.5, n_lat, n_lon, values).unwrap();
        AsfMap::try_from(r).unwrap()
    }

    #[test]
    fn node_value_exact() {
        let m = map(2, 3, vec![Some(0.1), Some(2.5), Some(0.3), Some(0.4), Some(0.5), None]);
        assert_eq!(m.interpolate(p(35.0, 126.5)), Some(2.5));
        // on a node next to NODATA the missing corner carries no weight
        assert_eq!(m.interpolate(p(35.5, 126.5)), Some(0.5));
    }

    #[test]
    fn cell_center_is_corner_mean() {
        // corners {0, 1, 1, 2}: bilinear at the midpoint is their mean
        let m = map(2, 2, vec![Some(0.0), Some(1.0), Some(1.0), Some(2.0)]);
        assert_eq!(m.interpolate(p(35.25, 126.25)), Some(1.0));
    }

    #[test]
    fn outside_and_nodata_are_invalid() {
        let m = map(2, 2, vec![Some(0.0), Some(1.0), None, Some(2.0)]);
        assert_eq!(m.interpolate(p(34.9, 126.2)), None);
        assert_eq!(m.interpolate(p(35.2, 126.6)), None);
        assert_eq!(m.interpolate(p(35.25, 126.25)), None);
        // bottom edge does not touch the NODATA corner
        assert_eq!(m.interpolate(p(35.0, 126.25)), Some(0.5));
    }

    #[test]
    fn too_small_or_out_of_bounds() {
        let r = Raster::new("X", p(0.0, 0.0), 1.0, 1.0, 1, 2, vec![Some(0.0); 2]).unwrap();
        assert!(matches!(AsfMap::try_from(r), Err(AsfMapError::TooSmall { .. })));
        let r = Raster::new(
            "X",
            p(0.0, 0.0),
            1.0,
            1.0,
            2,
            2,
            vec![Some(0.0), Some(101.0), None, None],
        )
        .unwrap();
        assert!(matches!(
            AsfMap::try_from(r),
            Err(AsfMapError::OutOfBounds { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn reference_on_node() {
        let m = map(2, 2, vec![Some(0.3), Some(-0.8), Some(1.0), Some(2.0)]);
        let s = Sphere::default();
        assert_eq!(reference_asf(&m, &s, p(35.0, 126.5)), Ok(-0.8));
    }

    #[test]
    fn reference_tie_goes_to_lower_row() {
        let m = map(2, 2, vec![Some(0.3), Some(-0.8), Some(1.0), Some(2.0)]);
        let s = Sphere::default();
        assert_eq!(reference_asf(&m, &s, p(35.25, 126.0)), Ok(0.3));
    }

    #[test]
    fn reference_skips_nodata() {
        let m = map(2, 2, vec![None, Some(-0.8), Some(1.0), Some(2.0)]);
        let s = Sphere::default();
        // the true nearest node (south-west) is NODATA
        assert_eq!(reference_asf(&m, &s, p(35.2, 126.02)), Ok(1.0));
        let empty = map(2, 2, vec![None; 4]);
        assert_eq!(reference_asf(&empty, &s, p(35.1, 126.05)), Err(AsfMapError::NoData));
    }
}
