//! Accuracy model for eLoran positioning under spatial ASF correction
//! scenarios.
//!
//! The crate is `no_std` with `alloc`. File formats, configuration and the
//! command-line front end live in the `lorasf` crate.
//!
//! Pipeline for one receiver position:
//!
//! 1. sample each station's ASF map ([`asf_map`]),
//! 2. compute SNR, usability and range sigma per station ([`signal`]),
//! 3. build the geometry matrix for usable stations ([`geo`]),
//! 4. form the scenario residuals ([`scenario`]),
//! 5. evaluate `sigma_pos`, `pos_bias` and ACC ([`wls`]).
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod asf_map;
pub mod geo;
pub mod raster;
pub mod scenario;
pub mod signal;
pub mod synth;
pub mod wls;

pub use asf_map::{interpolate_asf, reference_asf, AsfMap, AsfMapError};
pub use geo::{build_geometry_matrix, geodesic_range_bearing, GeoError, GeoPoint, GeometryMatrix, Sphere};
pub use raster::{Raster, RasterError};
pub use scenario::{
    mean_reduction, residual_vector, summary_compare, Comparison, GridSpec, GridStats, MeanReduction, ResolvedScenario,
    Scenario, ScenarioError, ScenarioResult, ScenarioTag, Simulation,
};
pub use signal::{
    field_strength, measurement_model, snr, LinkBudget, MeasurementModel, NoiseModel, PropagationParams, SignalError,
    TransmitterSpec,
};
pub use wls::{
    acc, bias_solution, normal_matrix, range_bias, sigma_pos, solve_accuracy, AccResult, Accuracy, NoFixReason,
    ResidualVector, SolverError,
};
