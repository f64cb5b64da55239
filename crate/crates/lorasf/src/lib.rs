//! File formats, run configuration and orchestration for the `lorasf`
//! eLoran ASF-correction accuracy simulator. The numerics live in
//! `lorasf-core`.

pub mod config;
pub mod gridfile;
pub mod run;
pub mod sweep;
pub mod synth;

pub use config::{load_config, parse_config, ConfigError, RunConfig};
pub use gridfile::{load_asf_map, read_raster, write_asf_map, write_raster, GridFileError};
pub use run::{run, simulate, RunError, RunOutput};
pub use sweep::par_evaluate_grid;
