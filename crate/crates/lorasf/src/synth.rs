//! Parameters of the `synth` subcommand.

use lorasf_core::synth::{synthesize, SynthGrid, SynthKind};
use lorasf_core::{AsfMap, GeoPoint, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Constant,
    Gradient,
    Bump,
}

/// Map extent plus field parameters in microseconds and degrees. Fields a
/// shape does not use are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub shape: Shape,
    pub station: String,
    pub extent: GridSpec,
    pub offset_us: f64,
    pub grad_lat_us_per_deg: f64,
    pub grad_lon_us_per_deg: f64,
    pub amplitude_us: f64,
    /// Defaults to the middle of the extent.
    pub center: Option<(f64, f64)>,
    pub sigma_deg: f64,
}

impl SynthParams {
    /// Extent covering the default study grid with half a degree to spare.
    pub fn default_extent() -> GridSpec {
        let g = GridSpec::default();
        GridSpec {
            lat_min: g.lat_min - 0.5,
            lat_max: g.lat_max + 0.5,
            lon_min: g.lon_min - 0.5,
            lon_max: g.lon_max + 0.5,
            step: g.step,
        }
    }

    pub fn new(shape: Shape, station: impl Into<String>) -> Self {
        Self {
            shape,
            station: station.into(),
            extent: Self::default_extent(),
            offset_us: 0.0,
            grad_lat_us_per_deg: 0.0,
            grad_lon_us_per_deg: 0.0,
            amplitude_us: 0.0,
            center: None,
            sigma_deg: 1.0,
        }
    }

    pub fn kind(&self) -> Result<SynthKind, String> {
        let finite = [
            self.offset_us,
            self.grad_lat_us_per_deg,
            self.grad_lon_us_per_deg,
            self.amplitude_us,
            self.sigma_deg,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err("synth parameters must be finite".into());
        }
        Ok(match self.shape {
            Shape::Constant => SynthKind::Constant {
                offset_us: self.offset_us,
            },
            Shape::Gradient => SynthKind::Gradient {
                offset_us: self.offset_us,
                per_deg_lat: self.grad_lat_us_per_deg,
                per_deg_lon: self.grad_lon_us_per_deg,
            },
            Shape::Bump => {
                if !(self.sigma_deg > 0.0) {
                    return Err("sigma must be positive".into());
                }
                let e = &self.extent;
                let (lat, lon) = self
                    .center
                    .unwrap_or(((e.lat_min + e.lat_max) / 2.0, (e.lon_min + e.lon_max) / 2.0));
                SynthKind::Bump {
                    offset_us: self.offset_us,
                    amplitude_us: self.amplitude_us,
                    center: GeoPoint::new(lat, lon).map_err(|e| format!("bump center: {e}"))?,
                    sigma_deg: self.sigma_deg,
                }
            }
        })
    }

    pub fn build(&self) -> Result<AsfMap, String> {
        self.extent.validate().map_err(|e| e.to_string())?;
        let grid = SynthGrid {
            origin: GeoPoint::new(self.extent.lat_min, self.extent.lon_min).map_err(|e| e.to_string())?,
            d_lat: self.extent.step,
            d_lon: self.extent.step,
            n_lat: self.extent.n_lat(),
            n_lon: self.extent.n_lon(),
        };
        synthesize(self.station.clone(), &grid, &self.kind()?).map_err(|e| e.to_string())
    }
}
