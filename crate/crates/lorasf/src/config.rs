//! TOML run configuration.
//!
//! ```toml
//! output_dir = "out"
//! snr_threshold_db = -15.0
//! sigma0_m = 10.0
//! earth_radius_m = 6371000.0
//!
//! [noise]
//! field_strength_dbuv = 62.0
//! percentile = 95.0
//! season = "Averaged"
//!
//! [propagation]
//! e0_dbuv = 100.0
//! d0_m = 1000.0
//! alpha_db_per_km = 0.007
//!
//! [grid]
//! lat_min = 33.0
//! lat_max = 39.0
//! lon_min = 124.0
//! lon_max = 131.0
//! step = 0.05
//!
//! [asf_maps]
//! Pohang = "maps/Pohang.grid"
//!
//! [[station]]
//! id = "Pohang"
//! lat = 36.1839
//! lon = 129.3411
//! power_kw = 150.0
//! jitter_m = 2.11
//!
//! [[scenario]]
//! tag = "S2"
//! reference_point = { lat = 37.449232, lon = 126.593994 }
//! ```
//!
//! Everything except `station`, `asf_maps` and `scenario` has a default.
//! Relative paths resolve against the directory holding the config file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use lorasf_core::geo::EARTH_RADIUS_M;
use lorasf_core::{
    GeoPoint, GridSpec, LinkBudget, NoiseModel, PropagationParams, Scenario, ScenarioTag, SignalError, Sphere,
    TransmitterSpec,
};
use serde::{Deserialize, Serialize};

/// A rejected configuration: the offending key path and why.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, reason: impl fmt::Display) -> Self {
        Self {
            key: key.into(),
            reason: reason.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "config: {}", self.reason)
        } else {
            write!(f, "config key `{}`: {}", self.key, self.reason)
        }
    }
}

impl std::error::Error for ConfigError {}

/// On-disk layout. Scalars come before tables so the struct serializes
/// back to valid TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_snr_threshold")]
    pub snr_threshold_db: f64,
    #[serde(default = "default_sigma0")]
    pub sigma0_m: f64,
    #[serde(default = "default_earth_radius")]
    pub earth_radius_m: f64,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub propagation: PropagationSection,
    #[serde(default)]
    pub grid: GridSection,
    pub asf_maps: BTreeMap<String, PathBuf>,
    pub station: Vec<StationEntry>,
    pub scenario: Vec<ScenarioEntry>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_snr_threshold() -> f64 {
    LinkBudget::default().snr_threshold_db
}

fn default_sigma0() -> f64 {
    LinkBudget::default().sigma0_m
}

fn default_earth_radius() -> f64 {
    EARTH_RADIUS_M
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub field_strength_dbuv: f64,
    pub percentile: f64,
    pub season: String,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let n = NoiseModel::default();
        Self {
            field_strength_dbuv: n.field_strength_dbuv,
            percentile: n.percentile,
            season: n.season,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagationSection {
    pub e0_dbuv: f64,
    pub d0_m: f64,
    pub alpha_db_per_km: f64,
}

impl Default for PropagationSection {
    fn default() -> Self {
        let p = PropagationParams::default();
        Self {
            e0_dbuv: p.e0_dbuv,
            d0_m: p.d0_m,
            alpha_db_per_km: p.alpha_db_per_km,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
    pub step: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            lat_min: g.lat_min,
            lat_max: g.lat_max,
            lon_min: g.lon_min,
            lon_max: g.lon_max,
            step: g.step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationEntry {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
    pub power_kw: f64,
    /// One-sigma timing jitter expressed in meters.
    pub jitter_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_point: Option<LatLon>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

/// Validated run configuration. Station, map and scenario lists share the
/// order of the `[[station]]` and `[[scenario]]` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub network: Vec<TransmitterSpec>,
    pub link: LinkBudget,
    pub sphere: Sphere,
    pub grid: GridSpec,
    pub scenarios: Vec<Scenario>,
    pub asf_map_paths: Vec<PathBuf>,
    pub output_dir: PathBuf,
}

/// Parses and validates config text. Relative paths are joined onto
/// `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::new("", e.message()))?;
    let file: ConfigFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        let key = if key == "." { String::new() } else { key };
        ConfigError::new(key, e.into_inner().message())
    })?;
    file.resolve(base_dir)
}

/// Reads a config file and resolves its relative paths against the file's
/// directory.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::new("", format!("{}: {e}", path.display())))?;
    let base = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let base = std::path::absolute(base).map_err(|e| ConfigError::new("", e))?;
    parse_config(&text, &base)
}

fn finite(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(key, "must be finite"))
    }
}

impl ConfigFile {
    pub fn resolve(&self, base_dir: &Path) -> Result<RunConfig, ConfigError> {
        if self.station.is_empty() {
            return Err(ConfigError::new("station", "at least one station is required"));
        }
        let mut network = Vec::with_capacity(self.station.len());
        for (k, s) in self.station.iter().enumerate() {
            let key = |field: &str| format!("station[{k}].{field}");
            let location = GeoPoint::new(finite(&key("lat"), s.lat)?, finite(&key("lon"), s.lon)?)
                .map_err(|_| ConfigError::new(key("lat"), "coordinates outside lat [-90, 90], lon [-180, 180]"))?;
            let spec = TransmitterSpec::new(s.id.clone(), location, s.power_kw, s.jitter_m).map_err(|e| {
                let field = match e {
                    SignalError::BadPower(_) => "power_kw",
                    SignalError::BadJitter(_) => "jitter_m",
                    _ => "id",
                };
                ConfigError::new(key(field), e)
            })?;
            if network.iter().any(|o: &TransmitterSpec| o.id() == s.id) {
                return Err(ConfigError::new(key("id"), format!("duplicate station id {}", s.id)));
            }
            network.push(spec);
        }

        let mut asf_map_paths = Vec::with_capacity(network.len());
        for s in &network {
            let path = self.asf_maps.get(s.id()).ok_or_else(|| {
                ConfigError::new(format!("asf_maps.{}", s.id()), "missing ASF map path for this station")
            })?;
            asf_map_paths.push(base_dir.join(path));
        }
        if let Some(extra) = self
            .asf_maps
            .keys()
            .find(|id| !network.iter().any(|s| s.id() == id.as_str()))
        {
            return Err(ConfigError::new(format!("asf_maps.{extra}"), "no station with this id"));
        }

        let link = LinkBudget {
            propagation: PropagationParams {
                e0_dbuv: self.propagation.e0_dbuv,
                d0_m: self.propagation.d0_m,
                alpha_db_per_km: self.propagation.alpha_db_per_km,
            },
            noise: NoiseModel {
                field_strength_dbuv: self.noise.field_strength_dbuv,
                percentile: self.noise.percentile,
                season: self.noise.season.clone(),
            },
            snr_threshold_db: self.snr_threshold_db,
            sigma0_m: self.sigma0_m,
        };
        link.validate().map_err(|e| {
            let key = match e {
                SignalError::BadPropagation => "propagation",
                SignalError::BadSigma0 => "sigma0_m",
                _ if !self.snr_threshold_db.is_finite() => "snr_threshold_db",
                _ => "noise",
            };
            ConfigError::new(key, e)
        })?;
        finite("noise.percentile", self.noise.percentile)?;

        let sphere = Sphere::new(self.earth_radius_m).map_err(|e| ConfigError::new("earth_radius_m", e))?;

        let grid = GridSpec {
            lat_min: self.grid.lat_min,
            lat_max: self.grid.lat_max,
            lon_min: self.grid.lon_min,
            lon_max: self.grid.lon_max,
            step: self.grid.step,
        };
        grid.validate().map_err(|e| ConfigError::new("grid", e))?;

        if self.scenario.is_empty() {
            return Err(ConfigError::new("scenario", "at least one scenario is required"));
        }
        let mut scenarios: Vec<Scenario> = Vec::with_capacity(self.scenario.len());
        for (k, entry) in self.scenario.iter().enumerate() {
            let tag: ScenarioTag = entry
                .tag
                .parse()
                .map_err(|_| ConfigError::new(format!("scenario[{k}].tag"), "expected one of S0, S1, S2"))?;
            if scenarios.iter().any(|s| s.tag() == tag) {
                return Err(ConfigError::new(
                    format!("scenario[{k}].tag"),
                    format!("duplicate scenario {tag}"),
                ));
            }
            let ref_key = format!("scenario[{k}].reference_point");
            let scenario = match (tag, entry.reference_point) {
                (ScenarioTag::S2, Some(p)) => Scenario::WideArea {
                    reference: GeoPoint::new(finite(&ref_key, p.lat)?, finite(&ref_key, p.lon)?)
                        .map_err(|_| ConfigError::new(&ref_key, "coordinates outside lat/lon range"))?,
                },
                (ScenarioTag::S2, None) => return Err(ConfigError::new(ref_key, "required for S2")),
                (_, Some(_)) => return Err(ConfigError::new(ref_key, "only valid for S2")),
                (ScenarioTag::S0, None) => Scenario::NoCorrection,
                (ScenarioTag::S1, None) => Scenario::Local,
            };
            scenarios.push(scenario);
        }

        Ok(RunConfig {
            network,
            link,
            sphere,
            grid,
            scenarios,
            asf_map_paths,
            output_dir: base_dir.join(&self.output_dir),
        })
    }
}

impl RunConfig {
    /// Fully explicit file form: every default filled in, paths absolute
    /// as resolved.
    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            output_dir: self.output_dir.clone(),
            snr_threshold_db: self.link.snr_threshold_db,
            sigma0_m: self.link.sigma0_m,
            earth_radius_m: self.sphere.radius_m(),
            noise: NoiseSection {
                field_strength_dbuv: self.link.noise.field_strength_dbuv,
                percentile: self.link.noise.percentile,
                season: self.link.noise.season.clone(),
            },
            propagation: PropagationSection {
                e0_dbuv: self.link.propagation.e0_dbuv,
                d0_m: self.link.propagation.d0_m,
                alpha_db_per_km: self.link.propagation.alpha_db_per_km,
            },
            grid: GridSection {
                lat_min: self.grid.lat_min,
                lat_max: self.grid.lat_max,
                lon_min: self.grid.lon_min,
                lon_max: self.grid.lon_max,
                step: self.grid.step,
            },
            asf_maps: self
                .network
                .iter()
                .zip(&self.asf_map_paths)
                .map(|(s, p)| (s.id().to_string(), p.clone()))
                .collect(),
            station: self
                .network
                .iter()
                .map(|s| StationEntry {
                    id: s.id().to_string(),
                    lat: s.location().lat(),
                    lon: s.location().lon(),
                    power_kw: s.power_kw(),
                    jitter_m: s.jitter_m(),
                })
                .collect(),
            scenario: self
                .scenarios
                .iter()
                .map(|s| ScenarioEntry {
                    tag: s.tag().as_str().to_string(),
                    reference_point: match s {
                        Scenario::WideArea { reference } => Some(LatLon {
                            lat: reference.lat(),
                            lon: reference.lon(),
                        }),
                        _ => None,
                    },
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("config file form always serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[asf_maps]
A = "a.grid"

[[station]]
id = "A"
lat = 36.0
lon = 129.0
power_kw = 100.0
jitter_m = 2.0

[[scenario]]
tag = "S1"
"#;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        parse_config(text, Path::new("/base"))
    }

    #[test]
    fn defaults_and_path_resolution() {
        let cfg = parse(MINIMAL).unwrap();
        assert_eq!(cfg.link, LinkBudget::default());
        assert_eq!(cfg.grid, GridSpec::default());
        assert_eq!(cfg.sphere.radius_m(), EARTH_RADIUS_M);
        assert_eq!(cfg.asf_map_paths, vec![PathBuf::from("/base/a.grid")]);
        assert_eq!(cfg.output_dir, PathBuf::from("/base/out"));
        assert_eq!(cfg.scenarios, vec![Scenario::Local]);
    }

    #[test]
    fn explicit_form_round_trips() {
        let mut text = MINIMAL.replace(
            "tag = \"S1\"",
            "tag = \"S2\"\nreference_point = { lat = 37.4, lon = 126.5 }",
        );
        text.insert_str(0, "sigma0_m = 12.5\n");
        let cfg = parse(&text).unwrap();
        let again = parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_key_reports_path() {
        let text = MINIMAL.replace("jitter_m = 2.0", "jitter_m = 2.0\njiter = 1");
        let err = parse(&text).unwrap_err();
        assert!(err.key.starts_with("station[0]"), "{err}");
        assert!(err.reason.contains("jiter"), "{err}");
    }

    #[test]
    fn wrong_type_reports_path() {
        let err = parse(&MINIMAL.replace("power_kw = 100.0", "power_kw = \"high\"")).unwrap_err();
        assert_eq!(err.key, "station[0].power_kw", "{err}");
    }

    #[test]
    fn duplicate_station() {
        let text =
            format!("{MINIMAL}\n[[station]]\nid = \"A\"\nlat = 35.0\nlon = 127.0\npower_kw = 1.0\njitter_m = 1.0\n");
        let err = parse(&text).unwrap_err();
        assert_eq!(err.key, "station[1].id");
    }

    #[test]
    fn s2_needs_reference_and_only_s2_takes_one() {
        let err = parse(&MINIMAL.replace("\"S1\"", "\"S2\"")).unwrap_err();
        assert_eq!(err.key, "scenario[0].reference_point");
        let err = parse(&MINIMAL.replace(
            "tag = \"S1\"",
            "tag = \"S1\"\nreference_point = { lat = 1.0, lon = 2.0 }",
        ))
        .unwrap_err();
        assert_eq!(err.key, "scenario[0].reference_point");
    }

    #[test]
    fn empty_scenario_list() {
        let text = format!("scenario = []\n{}", MINIMAL.replace("[[scenario]]\ntag = \"S1\"\n", ""));
        let err = parse(&text).unwrap_err();
        assert_eq!(err.key, "scenario", "{err}");
    }

    #[test]
    fn map_keys_must_match_stations() {
        let err = parse(&MINIMAL.replace("A = \"a.grid\"", "A = \"a.grid\"\nB = \"b.grid\"")).unwrap_err();
        assert_eq!(err.key, "asf_maps.B");
        let err = parse(&MINIMAL.replace("A = \"a.grid\"", "")).unwrap_err();
        assert_eq!(err.key, "asf_maps.A");
    }

    #[test]
    fn bad_values() {
        let cases = [
            ("power_kw = 100.0", "power_kw = 0.0", "station[0].power_kw"),
            ("lat = 36.0", "lat = 96.0", "station[0].lat"),
            ("[[scenario]]", "[grid]\nstep = -1.0\n\n[[scenario]]", "grid"),
            (
                "[[scenario]]",
                "[propagation]\nd0_m = 0.0\n\n[[scenario]]",
                "propagation",
            ),
            ("tag = \"S1\"", "tag = \"S3\"", "scenario[0].tag"),
        ];
        for (from, to, key) in cases {
            let err = parse(&MINIMAL.replace(from, to)).unwrap_err();
            assert_eq!(err.key, key, "{to}: {err}");
        }
    }
}
