//! Multi-threaded grid sweep.

use lorasf_core::{GridSpec, Scenario, ScenarioError, ScenarioResult, Simulation};
use rayon::prelude::*;

/// Same result as [`Simulation::evaluate_grid`], with cells evaluated on
/// the rayon pool. Each cell is a pure function of its position, and the
/// collected order is row-major, so the output does not depend on thread
/// count or scheduling.
pub fn par_evaluate_grid(
    sim: &Simulation,
    scenario: Scenario,
    spec: &GridSpec,
) -> Result<ScenarioResult, ScenarioError> {
    spec.validate()?;
    let resolved = sim.resolve(scenario)?;
    let n_lon = spec.n_lon();
    let cells = (0..spec.len())
        .into_par_iter()
        .map(|k| sim.evaluate_point(&resolved, spec.point(k / n_lon, k % n_lon)))
        .collect();
    ScenarioResult::from_cells(*spec, scenario, cells)
}
