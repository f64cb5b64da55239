//! Run orchestration and output files.
//!
//! A run writes into the output directory:
//!
//! - `acc_<tag>.grid`: ACC in meters per scenario, NoFix cells as `NA`
//! - `diff_<a>_<b>.grid`: ACC(a) - ACC(b) for each scenario pair, `NA`
//!   unless both cells have a fix
//! - `summary.txt`: per-scenario statistics and pairwise mean comparisons
//! - `run_manifest.txt`: the fully resolved configuration, loadable as a
//!   config file, preceded by comment lines carrying the constants in use

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use lorasf_core::asf_map::ASF_BOUND_US;
use lorasf_core::geo::MIN_STATION_RANGE_M;
use lorasf_core::signal::MIN_DISTANCE_M;
use lorasf_core::wls::{MAX_CONDITION, SPEED_OF_LIGHT_M_S};
use lorasf_core::{
    summary_compare, AccResult, AsfMap, Comparison, GeoPoint, Raster, ScenarioError, ScenarioResult, Simulation,
};

use crate::config::{ConfigError, RunConfig};
use crate::gridfile::{self, GridFileError};
use crate::sweep::par_evaluate_grid;

pub const SUMMARY_FILE: &str = "summary.txt";
pub const MANIFEST_FILE: &str = "run_manifest.txt";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("ASF map {}: {source}", path.display())]
    Map { path: PathBuf, source: GridFileError },
    #[error("ASF map {}: labelled {found}, expected station {expected}", path.display())]
    MapLabel {
        path: PathBuf,
        found: String,
        expected: String,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("writing {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
}

impl RunError {
    /// 1 for bad configuration or input data, 2 for failures on our side.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Output { .. } | Self::Scenario(ScenarioError::CellCount { .. }) => 2,
            _ => 1,
        }
    }
}

pub fn load_maps(cfg: &RunConfig) -> Result<Vec<AsfMap>, RunError> {
    cfg.network
        .iter()
        .zip(&cfg.asf_map_paths)
        .map(|(station, path)| {
            let map_err = |source| RunError::Map {
                path: path.clone(),
                source,
            };
            let file = fs::File::open(path).map_err(|e| map_err(e.into()))?;
            let map = gridfile::load_asf_map(io::BufReader::new(file)).map_err(map_err)?;
            if map.station_id() != station.id() {
                return Err(RunError::MapLabel {
                    path: path.clone(),
                    found: map.station_id().to_string(),
                    expected: station.id().to_string(),
                });
            }
            Ok(map)
        })
        .collect()
}

/// Loads the maps and checks that every scenario can be resolved. This is
/// all of `validate`.
pub fn build_simulation(cfg: &RunConfig) -> Result<Simulation, RunError> {
    let maps = load_maps(cfg)?;
    let sim = Simulation::new(cfg.network.clone(), maps, cfg.link.clone(), cfg.sphere)?;
    for s in &cfg.scenarios {
        sim.resolve(*s)?;
    }
    Ok(sim)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub results: Vec<ScenarioResult>,
    pub comparisons: Vec<Comparison>,
}

/// Evaluates every configured scenario. Writes nothing.
pub fn simulate(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let sim = build_simulation(cfg)?;
    let results = cfg
        .scenarios
        .iter()
        .map(|s| par_evaluate_grid(&sim, *s, &cfg.grid))
        .collect::<Result<Vec<_>, _>>()?;
    let comparisons = summary_compare(&results)?;
    Ok(RunOutput { results, comparisons })
}

/// Simulates and writes all outputs into `cfg.output_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let out = simulate(cfg)?;
    write_outputs(cfg, &out, &cfg.output_dir)?;
    Ok(out)
}

/// Writes the output files and returns their paths.
pub fn write_outputs(cfg: &RunConfig, out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let write = |name: String, text: String| -> Result<PathBuf, RunError> {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|source| RunError::Output {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    };
    fs::create_dir_all(dir).map_err(|source| RunError::Output {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for r in &out.results {
        let raster = acc_raster(r);
        files.push(write(
            format!("{}.grid", raster.label()),
            gridfile::format_raster(&raster, "m"),
        )?);
    }
    for (k, a) in out.results.iter().enumerate() {
        for b in &out.results[k + 1..] {
            let raster = diff_raster(a, b);
            files.push(write(
                format!("{}.grid", raster.label()),
                gridfile::format_raster(&raster, "m"),
            )?);
        }
    }
    files.push(write(SUMMARY_FILE.into(), format_summary(cfg, out))?);
    files.push(write(MANIFEST_FILE.into(), format_manifest(cfg))?);
    Ok(files)
}

fn grid_raster(label: String, result: &ScenarioResult, values: Vec<Option<f64>>) -> Raster {
    let spec = result.spec();
    let origin = GeoPoint::new(spec.lat_min, spec.lon_min).expect("validated grid");
    Raster::new(label, origin, spec.step, spec.step, spec.n_lat(), spec.n_lon(), values)
        .expect("grid lattice forms a valid raster")
}

/// ACC grid labelled `acc_<tag>`, meters.
pub fn acc_raster(result: &ScenarioResult) -> Raster {
    let values = result.cells().iter().map(AccResult::acc).collect();
    grid_raster(format!("acc_{}", result.scenario().tag()), result, values)
}

/// `ACC(a) - ACC(b)` labelled `diff_<a>_<b>`, meters. Both results must
/// share a grid.
pub fn diff_raster(a: &ScenarioResult, b: &ScenarioResult) -> Raster {
    assert_eq!(a.spec(), b.spec(), "difference of results on different grids");
    let values = a
        .cells()
        .iter()
        .zip(b.cells())
        .map(|(x, y)| Some(x.acc()? - y.acc()?))
        .collect();
    grid_raster(format!("diff_{}_{}", a.scenario().tag(), b.scenario().tag()), a, values)
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.digits$}"))
}

pub fn format_summary(cfg: &RunConfig, out: &RunOutput) -> String {
    let g = &cfg.grid;
    let mut s = String::new();
    let _ = writeln!(s, "# lorasf {} summary", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "# grid lat {}..{} lon {}..{} step {} ({} x {} nodes)",
        g.lat_min,
        g.lat_max,
        g.lon_min,
        g.lon_max,
        g.step,
        g.n_lat(),
        g.n_lon()
    );
    let _ = writeln!(s, "# ACC in meters over cells with a fix");
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<8} {:>9} {:>9} {:>12} {:>12} {:>12} {:>12}",
        "scenario", "ok_cells", "nofix", "mean", "median", "p95", "max"
    );
    for r in &out.results {
        let st = r.stats();
        let sm = st.summary;
        let _ = writeln!(
            s,
            "{:<8} {:>9} {:>9} {:>12} {:>12} {:>12} {:>12}",
            r.scenario().tag(),
            st.ok_cell_count,
            st.nofix_cell_count,
            opt(sm.map(|x| x.mean), 3),
            opt(sm.map(|x| x.median), 3),
            opt(sm.map(|x| x.p95), 3),
            opt(sm.map(|x| x.max), 3),
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<8} {:<8} {:>12} {:>14} {:>14} {:>12} {:>10}",
        "baseline", "improved", "common_cells", "baseline_mean", "improved_mean", "reduction", "pct"
    );
    for c in &out.comparisons {
        let _ = writeln!(
            s,
            "{:<8} {:<8} {:>12} {:>14} {:>14} {:>12} {:>10}",
            c.baseline,
            c.improved,
            c.common_cells,
            opt(c.baseline_mean, 3),
            opt(c.improved_mean, 3),
            opt(c.reduction.map(|r| r.reduction_m), 3),
            opt(c.reduction.and_then(|r| r.reduction_pct), 2),
        );
    }
    s
}

/// Resolved configuration as loadable TOML, with the fixed constants and
/// version as leading comments.
pub fn format_manifest(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# lorasf run manifest");
    let _ = writeln!(s, "# version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# speed_of_light_m_s = {SPEED_OF_LIGHT_M_S}");
    let _ = writeln!(s, "# max_condition = {MAX_CONDITION:e}");
    let _ = writeln!(s, "# min_station_range_m = {MIN_STATION_RANGE_M}");
    let _ = writeln!(s, "# min_field_distance_m = {MIN_DISTANCE_M}");
    let _ = writeln!(s, "# asf_bound_us = {ASF_BOUND_US}");
    let _ = writeln!(s, "# grid_nodes = {} x {}", cfg.grid.n_lat(), cfg.grid.n_lon());
    s.push('\n');
    s.push_str(&cfg.to_toml());
    s
}
