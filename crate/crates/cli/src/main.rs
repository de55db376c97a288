//! Command-line driver: one subcommand per model, each run emitting a
//! single envelope (CSV or JSON) on stdout or into --out. Identical
//! invocations produce byte-identical output.
//!
//! Exit codes: 0 success (warnings included), 2 usage or argument errors,
//! 3 model or I/O failures.

mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use combscope_core::{Error, OutputFormat};
use std::fmt;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "combscope", version, about = "Diffraction laboratory for aperiodic point sets")]
struct Cli {
    /// Master seed for every sampled quantity
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Number of grid points (per-command default if omitted)
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Upper end of the frequency window (per-command default if omitted)
    #[arg(long, global = true)]
    kmax: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainMode {
    Perfect,
    Random,
}

#[derive(Subcommand)]
pub enum Command {
    /// Sign-flip substitution chain: spectral distribution function, exact and sampled
    Tm {
        /// Fixed-point iterations of the distribution recursion
        #[arg(long, default_value_t = 12)]
        iterations: usize,
        /// log2 of the sampled word length
        #[arg(long, default_value_t = 14)]
        word_log2: usize,
    },
    /// Middle-thirds devil's staircase on [0, 1]
    Cantor {
        #[arg(long, default_value_t = 20)]
        depth: u32,
    },
    /// Four-letter flip chain whose diffraction is exactly flat
    Rs {
        /// log2 of the sampled word length
        #[arg(long, default_value_t = 15)]
        window_log2: usize,
        /// Triangular smoothing half-width for the periodogram
        #[arg(long, default_value_t = 0.02)]
        bandwidth: f64,
    },
    /// Biased coin tosses on the integers: lattice atoms over a flat floor
    Bernoulli {
        #[arg(long, default_value_t = 0.7)]
        p: f64,
        /// Points sit on -half_width..=half_width
        #[arg(long, default_value_t = 16384)]
        half_width: usize,
        #[arg(long, default_value_t = 0.05)]
        bandwidth: f64,
    },
    /// Independent sign flips applied to the flat-spectrum chain
    Bernoullise {
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 16)]
        window_log2: usize,
        #[arg(long, default_value_t = 0.02)]
        bandwidth: f64,
    },
    /// Random dimer tilings and their close-packed factor
    Dimer {
        /// Sampled word length
        #[arg(long, default_value_t = 131072)]
        window: usize,
        #[arg(long, default_value_t = 0.02)]
        bandwidth: f64,
    },
    /// Plane sign field with the three-point product constraint
    Ledrappier {
        #[arg(long, default_value_t = 512)]
        size: usize,
        #[arg(long, default_value_t = 8)]
        max_lag: usize,
    },
    /// Rescaled random-matrix eigenvalues against the exact spectral density
    Gue {
        /// Matrix dimension
        #[arg(long, default_value_t = 120)]
        size: usize,
        #[arg(long, default_value_t = 150)]
        samples: usize,
        #[arg(long, default_value_t = 0.05)]
        bandwidth: f64,
    },
    /// Stationary point process with i.i.d. gaps from a registered law
    Renewal {
        /// Gap law: gamma:SHAPE, point:GAP, or fib
        #[arg(long, default_value = "gamma:2")]
        dist: String,
        /// Sampled window length
        #[arg(long, default_value_t = 20000.0)]
        length: f64,
        #[arg(long, default_value_t = 0.05)]
        bandwidth: f64,
    },
    /// Two-interval chains with the golden ratio: perfect or randomized
    Fibonacci {
        #[arg(long, value_enum, default_value_t = ChainMode::Perfect)]
        mode: ChainMode,
        /// Substitution steps for the perfect chain
        #[arg(long, default_value_t = 22)]
        steps: usize,
        /// Tile count for the random tiling; accepts scientific notation
        #[arg(long, default_value = "1e5")]
        tiles: String,
        /// Cap emitted density values at this height (off by default)
        #[arg(long)]
        clip: Option<f64>,
        #[arg(long, default_value_t = 0.02)]
        bandwidth: f64,
    },
    /// Complex-weighted point process: windowed autocorrelation vs typical-point average
    Palm {
        /// Ground process: poisson:RATE, lattice:SPACING, or a gap law
        #[arg(long, default_value = "poisson:1")]
        ground: String,
        /// Mark law: const:RE,IM, gauss:RE,IM,SIGMA, or phase:MODULUS
        #[arg(long, default_value = "gauss:0.8,0.4,0.5")]
        marks: String,
        #[arg(long, default_value_t = 24)]
        runs: usize,
        /// Sampling window half-length
        #[arg(long, default_value_t = 300.0)]
        radius: f64,
        /// Base window half-length for the estimators
        #[arg(long, default_value_t = 295.0)]
        base: f64,
        #[arg(long, default_value_t = 2.5)]
        max_dist: f64,
        /// Lag histogram bin width
        #[arg(long, default_value_t = 0.25)]
        bin: f64,
        /// JSON file {"ground": ..., "marks": ..., "seed": ...} overriding the flags
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

pub enum CliError {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::InvalidArgument(_)) => 2,
            _ => 3,
        }
    }
}

pub struct RunConfig {
    pub seed: u64,
    pub grid: Option<usize>,
    pub kmax: Option<f64>,
}

fn main() {
    let cli = Cli::parse();
    let config = RunConfig { seed: cli.seed, grid: cli.grid, kmax: cli.kmax };
    let format = match cli.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    match run(&cli.command, &config, format, cli.out.as_deref()) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(
    command: &Command,
    config: &RunConfig,
    format: OutputFormat,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let envelope = commands::build(command, config)?;
    let text = envelope.render(format);
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
