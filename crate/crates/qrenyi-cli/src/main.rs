//! `qrenyi`: reports and sweeps over the Renyi uncertainty bounds.
//!
//! Exit status: 0 on success, 1 when a bounds report contains a violated bound, 2 on usage
//! errors and 3 on input or numerical errors.

mod commands;
mod input;

use clap::{Args, Parser, Subcommand, ValueEnum};
use input::{EstimatorSpec, GeneratorSpec};
use qrenyi::metrology::{Prior, DEFAULT_GRID};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "qrenyi", version, about = "Renyi-entropic uncertainty bounds for phase, rotation and time estimation")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Report entropies in bits. Overrides RENYI_LOG_BASE.
    #[arg(long, global = true)]
    pub bits: bool,
    /// Seed for random estimators, measurements and optimizer starts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Phase grid size for sampled densities.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Table of f(alpha) and alpha^{alpha/(alpha-1)} f(alpha), with the maximizer row marked.
    FCurve {
        #[arg(long, default_value_t = 0.5)]
        alpha_min: f64,
        #[arg(long, default_value_t = 3.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 51)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Every applicable bound for a probe, one row per (bound, order). Exits with status 1 if
    /// any slack is below -1e-6.
    BoundsReport {
        #[command(flatten)]
        state: StateArgs,
        /// `circle` or `interval:LENGTH[:CENTER]`.
        #[arg(long, default_value = "circle", value_parser = input::parse_prior)]
        prior: Prior,
        /// `canonical`, `constant:ANGLE`, `rotated` or `projective`.
        #[arg(long, default_value = "canonical")]
        estimator: EstimatorSpec,
        #[arg(long, default_value = "scenario")]
        id: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Recompute with doubled grid and cutoff and report the changes.
        #[arg(long)]
        audit: bool,
    },
    /// Asymmetry at each order, with optimizer diagnostics (JSON).
    Asymmetry {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Coherence measures and their phase-entropy bounds (JSON).
    Coherence {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Information chain I <= chi <= A <= H_beta for a discretized uniform prior (JSON).
    HolevoChain {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 4)]
        cells: usize,
        /// Half width of the prior interval.
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        half_width: f64,
        #[arg(long, default_value_t = 0.0)]
        center: f64,
    },
    /// Energy-time report: almost-periodic entropies, the asymmetry relations and, for
    /// periodic spectra, time-estimation bounds (JSON).
    TimeEnergy {
        #[arg(long)]
        state: PathBuf,
        /// JSON `{"levels": [...], "degeneracy": d}`.
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        alphas: Vec<String>,
        /// Prior length for the time-estimation bounds; defaults to the period.
        #[arg(long)]
        prior_length: Option<f64>,
        /// Force the windowed Cesaro mean.
        #[arg(long)]
        windowed: bool,
        /// Also write the entropy sweep as CSV to this path.
        #[arg(long)]
        sweep_csv: Option<PathBuf>,
    },
    /// Searches probe families for small (<N> + 1/2) * min deviation (JSON). Reports only.
    ConjectureSearch {
        #[arg(long, value_enum, default_value_t = Family::TwoTerm)]
        family: Family,
        /// Largest photon number for `two-term`, dimension for `real`.
        #[arg(long, default_value_t = 8)]
        size: usize,
        #[arg(long, default_value_t = 4000)]
        budget: usize,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    TwoTerm,
    Real,
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// JSON `{"dim": d, "labels": [...], "matrix": [[{"re":..,"im":..}]]}`.
    #[arg(long)]
    pub state: PathBuf,
    /// `number`, `jz` or `diag:v0,v1,...`.
    #[arg(long, default_value = "number")]
    pub generator: GeneratorSpec,
    /// Comma-separated Renyi orders, `inf` allowed.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alphas: Vec<String>,
}

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_ERROR: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let usage = e.downcast_ref::<commands::UsageError>().is_some();
            eprintln!("error: {e:#}");
            ExitCode::from(if usage { EXIT_USAGE } else { EXIT_ERROR })
        }
    }
}
