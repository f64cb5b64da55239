//! Received signal strength, SNR usability, and per-station range sigma.
//!
//! The groundwave model is a log-domain stand-in: inverse-distance spreading
//! plus a linear attenuation term,
//!
//! `E(d) = E0 + 10 log10(P / 1 kW) - 20 log10(d / d0) - alpha (d - d0) / 1000`
//!
//! with `E` in dB(uV/m), `d` in meters and `alpha` in dB/km. It is not a
//! fit to ITU groundwave curves.

use alloc::string::String;
use alloc::vec::Vec;

use libm::{log10, pow, sqrt};

use crate::geo::{GeoPoint, Sphere};

/// Distances below this are clamped before evaluating the field strength.
pub const MIN_DISTANCE_M: f64 = 1_000.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("transmitter {0}: power must be finite and positive")]
    BadPower(String),
    #[error("transmitter {0}: jitter must be finite and non-negative")]
    BadJitter(String),
    #[error("station id must be a non-empty token without whitespace")]
    BadStationId,
    #[error("duplicate station id {0}")]
    DuplicateStation(String),
    #[error("propagation parameters must be finite with d0 > 0 and alpha >= 0")]
    BadPropagation,
    #[error("noise field strength must be finite")]
    BadNoise,
    #[error("sigma0 must be finite and positive")]
    BadSigma0,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmitterSpec {
    id: String,
    location: GeoPoint,
    power_kw: f64,
    jitter_m: f64,
}

impl TransmitterSpec {
    pub fn new(id: impl Into<String>, location: GeoPoint, power_kw: f64, jitter_m: f64) -> Result<Self, SignalError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(SignalError::BadStationId);
        }
        if !(power_kw.is_finite() && power_kw > 0.0) {
            return Err(SignalError::BadPower(id));
        }
        if !(jitter_m.is_finite() && jitter_m >= 0.0) {
            return Err(SignalError::BadJitter(id));
        }
        Ok(Self {
            id,
            location,
            power_kw,
            jitter_m,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn location(&self) -> GeoPoint {
        self.location
    }

    pub fn power_kw(&self) -> f64 {
        self.power_kw
    }

    pub fn jitter_m(&self) -> f64 {
        self.jitter_m
    }
}

/// Rejects networks with repeated station ids.
pub fn check_unique_ids(stations: &[TransmitterSpec]) -> Result<(), SignalError> {
    for (k, s) in stations.iter().enumerate() {
        if stations[..k].iter().any(|o| o.id == s.id) {
            return Err(SignalError::DuplicateStation(s.id.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationParams {
    /// Field strength at `d0_m` for 1 kW, dB(uV/m).
    pub e0_dbuv: f64,
    pub d0_m: f64,
    /// Linear attenuation, dB per km beyond `d0_m`.
    pub alpha_db_per_km: f64,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self {
            e0_dbuv: 100.0,
            d0_m: 1_000.0,
            alpha_db_per_km: 0.007,
        }
    }
}

impl PropagationParams {
    pub fn validate(&self) -> Result<(), SignalError> {
        let ok = self.e0_dbuv.is_finite()
            && self.d0_m.is_finite()
            && self.d0_m > 0.0
            && self.alpha_db_per_km.is_finite()
            && self.alpha_db_per_km >= 0.0;
        ok.then_some(()).ok_or(SignalError::BadPropagation)
    }
}

/// Atmospheric noise. Only `field_strength_dbuv` enters the computation;
/// the percentile and season are carried as labels.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub field_strength_dbuv: f64,
    pub percentile: f64,
    pub season: String,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            field_strength_dbuv: 62.0,
            percentile: 95.0,
            season: String::from("Averaged"),
        }
    }
}

pub fn field_strength(power_kw: f64, distance_m: f64, prop: &PropagationParams) -> f64 {
    let d = distance_m.max(MIN_DISTANCE_M);
    prop.e0_dbuv + 10.0 * log10(power_kw)
        - 20.0 * log10(d / prop.d0_m)
        - prop.alpha_db_per_km * (d - prop.d0_m) / 1000.0
}

pub fn snr(field_dbuv: f64, noise: &NoiseModel) -> f64 {
    field_dbuv - noise.field_strength_dbuv
}

/// `sigma^2 = jitter^2 + (sigma0 * 10^(-snr/20))^2`, in meters.
pub fn range_sigma(jitter_m: f64, snr_db: f64, sigma0_m: f64) -> f64 {
    let noise_term = sigma0_m * pow(10.0, -snr_db / 20.0);
    sqrt(jitter_m * jitter_m + noise_term * noise_term)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationMeasurement {
    pub snr_db: f64,
    /// `Some((sigma_m, weight))` when the station clears the SNR threshold.
    pub usable: Option<UsableMeasurement>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsableMeasurement {
    pub sigma_m: f64,
    /// `1 / sigma^2`, 1/m^2.
    pub weight: f64,
}

impl StationMeasurement {
    pub fn is_usable(&self) -> bool {
        self.usable.is_some()
    }
}

/// Per-station measurement quality at one receiver position, in network
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    pub stations: Vec<StationMeasurement>,
}

/// Receiver-side link parameters shared by every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub propagation: PropagationParams,
    pub noise: NoiseModel,
    pub snr_threshold_db: f64,
    pub sigma0_m: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            propagation: PropagationParams::default(),
            noise: NoiseModel::default(),
            snr_threshold_db: -15.0,
            sigma0_m: 10.0,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<(), SignalError> {
        self.propagation.validate()?;
        if !self.noise.field_strength_dbuv.is_finite() || !self.snr_threshold_db.is_finite() {
            return Err(SignalError::BadNoise);
        }
        if !(self.sigma0_m.is_finite() && self.sigma0_m > 0.0) {
            return Err(SignalError::BadSigma0);
        }
        Ok(())
    }

    pub fn measure(&self, sphere: &Sphere, station: &TransmitterSpec, rx: GeoPoint) -> StationMeasurement {
        let distance = sphere.range(rx, station.location);
        let snr_db = snr(
            field_strength(station.power_kw, distance, &self.propagation),
            &self.noise,
        );
        let usable = (snr_db >= self.snr_threshold_db).then(|| {
            let sigma_m = range_sigma(station.jitter_m, snr_db, self.sigma0_m);
            UsableMeasurement {
                sigma_m,
                weight: 1.0 / (sigma_m * sigma_m),
            }
        });
        StationMeasurement { snr_db, usable }
    }
}

pub fn measurement_model(
    sphere: &Sphere,
    stations: &[TransmitterSpec],
    rx: GeoPoint,
    link: &LinkBudget,
) -> MeasurementModel {
    MeasurementModel {
        stations: stations.iter().map(|s| link.measure(sphere, s, rx)).collect(),
    }
}
