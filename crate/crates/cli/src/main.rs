mod commands;
mod error;
mod matrix_file;
mod parse;
mod svg;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use moebius_core::contraction::Window;
use moebius_core::tolerances::{DEFAULT_BAND, DEFAULT_CONDITION_CAP};
use moebius_core::{Complex64, SpectralConfig};

use commands::{MatrixSource, Output, RegionArgs};
use error::CliError;

/// Contraction tests for Möbius functions of matrices and of the
/// discretized Volterra operator.
///
/// Exit codes: 0 success, 1 property violation or failed computation,
/// 2 bad arguments, 3 I/O error, 4 malformed matrix file.
#[derive(Parser)]
#[command(name = "moebius", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random finite matrices: direct norm, quadratic gap and support
    /// inequality must agree away from ties.
    #[command(name = "verify-theorem1")]
    VerifyTheorem1 {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Dimension range `lo..hi` (inclusive) or a single dimension.
        #[arg(long, default_value = "2..8", value_parser = parse::dims)]
        dims: RangeInclusive<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Condition number cap for the random matrices.
        #[arg(long, default_value_t = DEFAULT_CONDITION_CAP)]
        cap: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Norm of (I + lambda V)(I + mu V)^-1 over a window of the lambda-plane,
    /// checked against the segment [-conj(mu), mu).
    VolterraRegion {
        #[command(flatten)]
        region: RegionFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Same scan for a power V^n, n >= 2, where no lambda != mu gives a
    /// contraction.
    VnRegion {
        #[arg(long, default_value_t = 2)]
        power: u32,
        #[command(flatten)]
        region: RegionFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Boundary of the numerical range of V_N or of a matrix file.
    Numrange {
        #[arg(long, default_value_t = 400)]
        n: usize,
        /// Matrix file (first line the dimension, then rows of re:im entries);
        /// overrides --n.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        angles: usize,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Rayleigh quotients of the witness functions.
    Witnesses {
        /// Emit g_n^+, g_n^- and h_n for n = 1..=n-max.
        #[arg(long, default_value_t = 0)]
        n_max: u32,
        /// g_r witness as n:theta:r; theta may be written with pi, e.g. -pi/4.
        /// Repeatable.
        #[arg(long, value_parser = parse::gr_witness, allow_hyphen_values = true)]
        gr: Vec<(u32, f64, f64)>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Support of the computed W(V_N) against the reference boundary curve.
    Curves {
        #[arg(long, default_value_t = 400)]
        n: usize,
        #[arg(long, default_value_t = 256)]
        angles: usize,
        #[command(flatten)]
        output: OutputFlags,
    },
}

#[derive(Args)]
struct RegionFlags {
    /// mu as re:im
    #[arg(long, default_value = "1:0", value_parser = parse::complex, allow_hyphen_values = true)]
    mu: Complex64,
    /// Grid size of the discretization.
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// lambda window as x0:x1:y0:y1
    #[arg(long, default_value = "-1.5:1.5:-1.5:1.5", value_parser = parse::window, allow_hyphen_values = true)]
    window: Window,
    /// Grid nodes per axis as nx:ny
    #[arg(long, default_value = "61:61", value_parser = parse::resolution)]
    res: (usize, usize),
    /// Half-width of the Boundary band around norm 1.
    #[arg(long, default_value_t = DEFAULT_BAND)]
    tol: f64,
}

impl RegionFlags {
    fn args(&self) -> Result<RegionArgs, CliError> {
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be a nonnegative number, got {}", self.tol)));
        }
        Ok(RegionArgs {
            mu: self.mu,
            n: self.n,
            window: self.window,
            resolution: self.res,
            band: self.tol,
        })
    }
}

#[derive(Args)]
struct OutputFlags {
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Write CSV (default: both CSV and SVG).
    #[arg(long)]
    csv: bool,
    /// Write SVG (default: both CSV and SVG).
    #[arg(long)]
    svg: bool,
}

impl OutputFlags {
    fn output(&self) -> Output {
        Output::new(self.out.clone(), self.csv, self.svg)
    }
}

fn run(command: Command) -> Result<commands::Outcome, CliError> {
    let cfg = SpectralConfig::default();
    match command {
        Command::VerifyTheorem1 {
            trials,
            dims,
            seed,
            cap,
            out,
        } => commands::verify_theorem1(&Output::new(out, true, false), trials, dims, seed, cap, &cfg),
        Command::VolterraRegion { region, output } => commands::volterra_region(&output.output(), &region.args()?, &cfg),
        Command::VnRegion { power, region, output } => {
            commands::vn_region(&output.output(), power, &region.args()?, &cfg)
        }
        Command::Numrange {
            n,
            matrix,
            angles,
            output,
        } => {
            let source = matrix.map_or(MatrixSource::Volterra(n), MatrixSource::File);
            commands::numrange(&output.output(), &source, angles, &cfg)
        }
        Command::Witnesses { n_max, gr, out } => commands::witnesses(&Output::new(out, true, false), n_max, &gr),
        Command::Curves { n, angles, output } => commands::curves(&output.output(), n, angles, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) if outcome.violation => {
            eprintln!("property violated");
            ExitCode::from(1)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
