//! Correction scenarios and the grid sweep.
//!
//! Residual rules per station `s`:
//!
//! | scenario | residual                         |
//! |----------|----------------------------------|
//! | S0       | `ASF_true(s)`                    |
//! | S1       | `0`                              |
//! | S2       | `ASF_true(s) - ASF_ref(s)`       |
//!
//! `ASF_ref(s)` is the value of the map node nearest to the reference
//! point. Everything except the residuals (geometry, weights, usability) is
//! shared across scenarios, so `sigma_pos` is identical between them.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::floor;

use crate::asf_map::{AsfMap, AsfMapError};
use crate::geo::{build_geometry_matrix, GeoError, GeoPoint, Sphere};
use crate::signal::{check_unique_ids, LinkBudget, SignalError, TransmitterSpec};
use crate::wls::{solve_accuracy, AccResult, NoFixReason, ResidualVector, SolverError};

/// Upper bound on nodes per axis, as `extent / step`.
pub const MAX_GRID_STEPS: f64 = 5_000.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario S2 requires reference ASF values")]
    MissingReference,
    #[error("reference ASF values given for a scenario other than S2")]
    UnexpectedReference,
    #[error("residual inputs differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no ASF map for station {0}")]
    MissingMap(String),
    #[error("ASF map for {0} does not match any station")]
    UnexpectedMap(String),
    #[error("network has no stations")]
    EmptyNetwork,
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("results do not share one grid")]
    GridMismatch,
    #[error("cell count {actual} does not match grid size {expected}")]
    CellCount { expected: usize, actual: usize },
    #[error("station {station}: {source}")]
    Reference { station: String, source: AsfMapError },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioTag {
    S0,
    S1,
    S2,
}

impl ScenarioTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::S0 => "S0",
            Self::S1 => "S1",
            Self::S2 => "S2",
        }
    }
}

impl fmt::Display for ScenarioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ScenarioTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S0" => Ok(Self::S0),
            "S1" => Ok(Self::S1),
            "S2" => Ok(Self::S2),
            other => Err(alloc::format!("unknown scenario tag {other:?}, expected S0, S1 or S2")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// S0: spatial ASF left in the measurements.
    NoCorrection,
    /// S1: true ASF removed at every point.
    Local,
    /// S2: one reference-node value per station applied everywhere.
    WideArea { reference: GeoPoint },
}

impl Scenario {
    pub fn tag(&self) -> ScenarioTag {
        match self {
            Self::NoCorrection => ScenarioTag::S0,
            Self::Local => ScenarioTag::S1,
            Self::WideArea { .. } => ScenarioTag::S2,
        }
    }
}

pub fn residual_vector(
    tag: ScenarioTag,
    asf_true: &[f64],
    asf_ref: Option<&[f64]>,
) -> Result<ResidualVector, ScenarioError> {
    let r = match (tag, asf_ref) {
        (ScenarioTag::S2, None) => return Err(ScenarioError::MissingReference),
        (ScenarioTag::S0 | ScenarioTag::S1, Some(_)) => return Err(ScenarioError::UnexpectedReference),
        (ScenarioTag::S0, None) => asf_true.to_vec(),
        (ScenarioTag::S1, None) => alloc::vec![0.0; asf_true.len()],
        (ScenarioTag::S2, Some(refs)) => {
            if refs.len() != asf_true.len() {
                return Err(ScenarioError::LengthMismatch(asf_true.len(), refs.len()));
            }
            asf_true.iter().zip(refs).map(|(t, r)| t - r).collect()
        }
    };
    Ok(ResidualVector(r))
}

/// Study-area lattice. Nodes sit at `lat_min + i * step`,
/// `lon_min + j * step` up to and including the max bounds when they fall on
/// the lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lat_min: 33.0,
            lat_max: 39.0,
            lon_min: 124.0,
            lon_max: 131.0,
            step: 0.05,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let finite = [self.lat_min, self.lat_max, self.lon_min, self.lon_max, self.step]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(ScenarioError::InvalidGrid("non-finite bound or step"));
        }
        if !(self.step > 0.0) {
            return Err(ScenarioError::InvalidGrid("step must be positive"));
        }
        if !(self.lat_min < self.lat_max) || !(self.lon_min < self.lon_max) {
            return Err(ScenarioError::InvalidGrid("min bound must be below max bound"));
        }
        if GeoPoint::new(self.lat_min, self.lon_min).is_err() || GeoPoint::new(self.lat_max, self.lon_max).is_err() {
            return Err(ScenarioError::InvalidGrid("bounds outside lat/lon range"));
        }
        if (self.lat_max - self.lat_min) / self.step > MAX_GRID_STEPS
            || (self.lon_max - self.lon_min) / self.step > MAX_GRID_STEPS
        {
            return Err(ScenarioError::InvalidGrid("more than 5000 steps per axis"));
        }
        Ok(())
    }

    fn count(min: f64, max: f64, step: f64) -> usize {
        floor((max - min) / step + 1e-9) as usize + 1
    }

    pub fn n_lat(&self) -> usize {
        Self::count(self.lat_min, self.lat_max, self.step)
    }

    pub fn n_lon(&self) -> usize {
        Self::count(self.lon_min, self.lon_max, self.step)
    }

    pub fn len(&self) -> usize {
        self.n_lat() * self.n_lon()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `(row, col)`; row 0 is the southern edge.
    pub fn point(&self, row: usize, col: usize) -> GeoPoint {
        let lat = (self.lat_min + row as f64 * self.step).min(90.0);
        let lon = self.lon_min + col as f64 * self.step;
        GeoPoint::new(lat, lon).expect("lattice inside validated bounds")
    }
}

/// Network, per-station ASF maps (same order as the network) and link
/// parameters for one run.
#[derive(Debug, Clone)]
pub struct Simulation {
    stations: Vec<TransmitterSpec>,
    maps: Vec<AsfMap>,
    link: LinkBudget,
    sphere: Sphere,
}

impl Simulation {
    /// Pairs each station with the map whose station id matches.
    pub fn new(
        stations: Vec<TransmitterSpec>,
        maps: Vec<AsfMap>,
        link: LinkBudget,
        sphere: Sphere,
    ) -> Result<Self, ScenarioError> {
        if stations.is_empty() {
            return Err(ScenarioError::EmptyNetwork);
        }
        check_unique_ids(&stations)?;
        link.validate()?;
        let mut pool: Vec<Option<AsfMap>> = maps.into_iter().map(Some).collect();
        let mut ordered = Vec::with_capacity(stations.len());
        for s in &stations {
            let slot = pool
                .iter_mut()
                .find(|m| m.as_ref().is_some_and(|m| m.station_id() == s.id()))
                .ok_or_else(|| ScenarioError::MissingMap(s.id().to_string()))?;
            ordered.push(slot.take().expect("slot checked above"));
        }
        if let Some(extra) = pool.into_iter().flatten().next() {
            return Err(ScenarioError::UnexpectedMap(extra.station_id().to_string()));
        }
        Ok(Self {
            stations,
            maps: ordered,
            link,
            sphere,
        })
    }

    pub fn stations(&self) -> &[TransmitterSpec] {
        &self.stations
    }

    pub fn maps(&self) -> &[AsfMap] {
        &self.maps
    }

    pub fn link(&self) -> &LinkBudget {
        &self.link
    }

    pub fn sphere(&self) -> &Sphere {
        &self.sphere
    }

    /// Extracts per-station reference values for S2.
    pub fn resolve(&self, scenario: Scenario) -> Result<ResolvedScenario, ScenarioError> {
        let asf_ref = match scenario {
            Scenario::WideArea { reference } => Some(
                self.maps
                    .iter()
                    .map(|m| {
                        m.reference_value(&self.sphere, reference)
                            .map_err(|source| ScenarioError::Reference {
                                station: m.station_id().to_string(),
                                source,
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            _ => None,
        };
        Ok(ResolvedScenario { scenario, asf_ref })
    }

    /// Accuracy at one receiver position.
    ///
    /// A station takes part only if its SNR clears the threshold and its
    /// ASF sample at `p` is valid.
    pub fn evaluate_point(&self, scenario: &ResolvedScenario, p: GeoPoint) -> AccResult {
        let n = self.stations.len();
        let mut locations = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut truth = Vec::with_capacity(n);
        let mut refs = Vec::with_capacity(n);
        for (k, (station, map)) in self.stations.iter().zip(&self.maps).enumerate() {
            let Some(usable) = self.link.measure(&self.sphere, station, p).usable else {
                continue;
            };
            let Some(asf) = map.interpolate(p) else {
                continue;
            };
            locations.push(station.location());
            weights.push(usable.weight);
            truth.push(asf);
            if let Some(r) = &scenario.asf_ref {
                refs.push(r[k]);
            }
        }
        if locations.len() < 3 {
            return AccResult::NoFix(NoFixReason::InsufficientStations);
        }
        let g = match build_geometry_matrix(&self.sphere, p, &locations) {
            Ok(g) => g,
            Err(GeoError::StationTooClose { .. }) => return AccResult::NoFix(NoFixReason::StationTooClose),
            Err(_) => return AccResult::NoFix(NoFixReason::InsufficientStations),
        };
        let refs = scenario.asf_ref.as_ref().map(|_| refs.as_slice());
        let r = residual_vector(scenario.scenario.tag(), &truth, refs)
            .expect("resolved scenario carries references iff S2");
        match solve_accuracy(&g, &weights, &r) {
            Ok(a) => AccResult::Fix(a),
            Err(SolverError::SingularGeometry) => AccResult::NoFix(NoFixReason::SingularGeometry),
            Err(_) => AccResult::NoFix(NoFixReason::InsufficientStations),
        }
    }

    /// Row-major sweep of `spec`.
    pub fn evaluate_grid(&self, scenario: Scenario, spec: &GridSpec) -> Result<ScenarioResult, ScenarioError> {
        spec.validate()?;
        let resolved = self.resolve(scenario)?;
        let (n_lat, n_lon) = (spec.n_lat(), spec.n_lon());
        let mut cells = Vec::with_capacity(n_lat * n_lon);
        for i in 0..n_lat {
            for j in 0..n_lon {
                cells.push(self.evaluate_point(&resolved, spec.point(i, j)));
            }
        }
        ScenarioResult::from_cells(*spec, scenario, cells)
    }
}

/// A scenario with its S2 reference values extracted.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    scenario: Scenario,
    asf_ref: Option<Vec<f64>>,
}

impl ResolvedScenario {
    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    /// Per-station reference ASF (us), network order; S2 only.
    pub fn reference_values(&self) -> Option<&[f64]> {
        self.asf_ref.as_deref()
    }
}

/// ACC summary over cells with a fix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccSummary {
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridStats {
    pub ok_cell_count: usize,
    pub nofix_cell_count: usize,
    /// `None` when no cell has a fix.
    pub summary: Option<AccSummary>,
}

impl GridStats {
    pub fn from_cells(cells: &[AccResult]) -> Self {
        let mut accs: Vec<f64> = cells.iter().filter_map(AccResult::acc).collect();
        let ok = accs.len();
        let summary = (ok > 0).then(|| {
            let mean = accs.iter().sum::<f64>() / ok as f64;
            accs.sort_by(f64::total_cmp);
            AccSummary {
                mean,
                median: quantile(&accs, 0.5),
                p95: quantile(&accs, 0.95),
                max: accs[ok - 1],
            }
        });
        Self {
            ok_cell_count: ok,
            nofix_cell_count: cells.len() - ok,
            summary,
        }
    }
}

/// Linear interpolation between closest ranks on sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    spec: GridSpec,
    scenario: Scenario,
    cells: Vec<AccResult>,
    stats: GridStats,
}

impl ScenarioResult {
    pub fn from_cells(spec: GridSpec, scenario: Scenario, cells: Vec<AccResult>) -> Result<Self, ScenarioError> {
        if cells.len() != spec.len() {
            return Err(ScenarioError::CellCount {
                expected: spec.len(),
                actual: cells.len(),
            });
        }
        let stats = GridStats::from_cells(&cells);
        Ok(Self {
            spec,
            scenario,
            cells,
            stats,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    /// Row-major, row 0 south.
    pub fn cells(&self) -> &[AccResult] {
        &self.cells
    }

    pub fn cell(&self, row: usize, col: usize) -> &AccResult {
        &self.cells[row * self.spec.n_lon() + col]
    }

    pub fn stats(&self) -> &GridStats {
        &self.stats
    }
}

/// Absolute and relative drop from a baseline mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanReduction {
    pub reduction_m: f64,
    /// `100 * reduction / baseline`; `None` for a zero baseline with a
    /// non-zero reduction.
    pub reduction_pct: Option<f64>,
}

pub fn mean_reduction(baseline_mean: f64, improved_mean: f64) -> MeanReduction {
    let reduction_m = baseline_mean - improved_mean;
    let reduction_pct = if reduction_m == 0.0 {
        Some(0.0)
    } else if baseline_mean == 0.0 {
        None
    } else {
        Some(100.0 * reduction_m / baseline_mean)
    };
    MeanReduction {
        reduction_m,
        reduction_pct,
    }
}

/// One pairwise comparison. The baseline is the scenario with the larger
/// mean over the cells where both have a fix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub baseline: ScenarioTag,
    pub improved: ScenarioTag,
    pub common_cells: usize,
    pub baseline_mean: Option<f64>,
    pub improved_mean: Option<f64>,
    pub reduction: Option<MeanReduction>,
}

/// Pairwise mean-ACC comparisons for every pair of results, in list order.
pub fn summary_compare(results: &[ScenarioResult]) -> Result<Vec<Comparison>, ScenarioError> {
    if let Some(first) = results.first() {
        if results.iter().any(|r| r.spec != first.spec) {
            return Err(ScenarioError::GridMismatch);
        }
    }
    let mut out = Vec::new();
    for (a_idx, a) in results.iter().enumerate() {
        for b in &results[a_idx + 1..] {
            let (mut sum_a, mut sum_b, mut n) = (0.0, 0.0, 0usize);
            for (ca, cb) in a.cells.iter().zip(&b.cells) {
                if let (Some(x), Some(y)) = (ca.acc(), cb.acc()) {
                    sum_a += x;
                    sum_b += y;
                    n += 1;
                }
            }
            let (mut ta, mut tb) = (a.scenario.tag(), b.scenario.tag());
            if n == 0 {
                out.push(Comparison {
                    baseline: ta,
                    improved: tb,
                    common_cells: 0,
                    baseline_mean: None,
                    improved_mean: None,
                    reduction: None,
                });
                continue;
            }
            let (mut ma, mut mb) = (sum_a / n as f64, sum_b / n as f64);
            if mb > ma {
                core::mem::swap(&mut ma, &mut mb);
                core::mem::swap(&mut ta, &mut tb);
            }
            out.push(Comparison {
                baseline: ta,
                improved: tb,
                common_cells: n,
                baseline_mean: Some(ma),
                improved_mean: Some(mb),
                reduction: Some(mean_reduction(ma, mb)),
            });
        }
    }
    Ok(out)
}
