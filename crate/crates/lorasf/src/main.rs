use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lorasf::synth::{Shape, SynthParams};
use lorasf::{load_config, run, RunError};

/// eLoran ASF-correction accuracy simulator.
#[derive(Parser)]
#[command(name = "lorasf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every configured scenario and write grids, summary and manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the config and load its ASF maps without simulating.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a synthetic ASF map.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Constant,
    Gradient,
    Bump,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    station: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = SynthParams::default_extent().lat_min, allow_negative_numbers = true)]
    lat_min: f64,
    #[arg(long, default_value_t = SynthParams::default_extent().lat_max, allow_negative_numbers = true)]
    lat_max: f64,
    #[arg(long, default_value_t = SynthParams::default_extent().lon_min, allow_negative_numbers = true)]
    lon_min: f64,
    #[arg(long, default_value_t = SynthParams::default_extent().lon_max, allow_negative_numbers = true)]
    lon_max: f64,
    /// Node spacing in degrees.
    #[arg(long, default_value_t = SynthParams::default_extent().step)]
    step: f64,
    /// Constant part, microseconds.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    offset: f64,
    /// Gradient north, microseconds per degree.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    grad_lat: f64,
    /// Gradient east, microseconds per degree.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    grad_lon: f64,
    /// Bump height, microseconds.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    amplitude: f64,
    /// Bump center; defaults to the middle of the extent.
    #[arg(long, allow_negative_numbers = true, requires = "center_lon")]
    center_lat: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "center_lat")]
    center_lon: Option<f64>,
    /// Bump width (one sigma), degrees.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

impl SynthArgs {
    fn params(&self) -> SynthParams {
        let shape = match self.kind {
            Kind::Constant => Shape::Constant,
            Kind::Gradient => Shape::Gradient,
            Kind::Bump => Shape::Bump,
        };
        let mut p = SynthParams::new(shape, self.station.clone());
        p.extent.lat_min = self.lat_min;
        p.extent.lat_max = self.lat_max;
        p.extent.lon_min = self.lon_min;
        p.extent.lon_max = self.lon_max;
        p.extent.step = self.step;
        p.offset_us = self.offset;
        p.grad_lat_us_per_deg = self.grad_lat;
        p.grad_lon_us_per_deg = self.grad_lon;
        p.amplitude_us = self.amplitude;
        p.center = self.center_lat.zip(self.center_lon);
        p.sigma_deg = self.sigma;
        p
    }
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn data(message: impl ToString) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }

    fn internal(message: impl ToString) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Self {
            code: e.exit_code(),
            message: e.to_string(),
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, out } => {
            let mut cfg = load_config(&config).map_err(Failure::data)?;
            if let Some(dir) = out {
                cfg.output_dir = std::path::absolute(&dir).map_err(Failure::internal)?;
            }
            let output = run::run(&cfg)?;
            for r in &output.results {
                let st = r.stats();
                let mean = st
                    .summary
                    .map_or_else(|| "NA".to_string(), |s| format!("{:.3} m", s.mean));
                eprintln!(
                    "{}: mean ACC {mean}, {} cells with fix, {} without",
                    r.scenario().tag(),
                    st.ok_cell_count,
                    st.nofix_cell_count
                );
            }
            eprintln!("outputs written to {}", cfg.output_dir.display());
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config).map_err(Failure::data)?;
            run::build_simulation(&cfg)?;
            eprintln!(
                "{}: {} stations, {} scenarios, {} x {} grid nodes",
                config.display(),
                cfg.network.len(),
                cfg.scenarios.len(),
                cfg.grid.n_lat(),
                cfg.grid.n_lon()
            );
            Ok(())
        }
        Command::Synth(args) => {
            let map = args.params().build().map_err(Failure::data)?;
            match &args.out {
                Some(path) => {
                    let file =
                        fs::File::create(path).map_err(|e| Failure::internal(format!("{}: {e}", path.display())))?;
                    let mut sink = BufWriter::new(file);
                    lorasf::write_asf_map(&map, &mut sink)
                        .and_then(|_| sink.flush())
                        .map_err(|e| Failure::internal(format!("{}: {e}", path.display())))
                }
                None => lorasf::write_asf_map(&map, io::stdout().lock()).map_err(Failure::internal),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| execute(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("lorasf: error: {}", f.message);
            ExitCode::from(f.code)
        }
        Err(_) => ExitCode::from(2),
    }
}
