//! `wcp`: distances, prior tables, calibration, convergence and simulation
//! studies from the command line.
//!
//! Exit codes: 0 success, 1 computational failure, 2 usage or configuration
//! error. `WCP_THREADS` sets the worker count for parallel studies.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser)]
#[command(name = "wcp", version, about = "Wasserstein complexity penalization priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance of a parameter value to the family's base model.
    Dist {
        #[arg(long)]
        family: String,
        /// Comma-separated parameter value.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        theta: Vec<f64>,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Density table of a catalog prior, with a JSON sidecar.
    Prior(PriorArgs),
    /// Rate η matching a tail probability target.
    Calibrate(CalibrateArgs),
    /// Total variation of the numerical density to the analytic one, per mesh width.
    TvStudy(TvStudyArgs),
    /// MAP simulation study from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output prefix: writes PREFIX.csv and PREFIX.summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild the golden tables and digest list.
    RegenGoldens {
        #[arg(long, default_value = "goldens")]
        dir: PathBuf,
        /// Compare with the committed goldens instead of writing.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args, Default)]
pub struct HyperArgs {
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub eta_minus: Option<f64>,
    #[arg(long)]
    pub eta_plus: Option<f64>,
    #[arg(long)]
    pub eta1: Option<f64>,
    #[arg(long)]
    pub eta2: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
}

#[derive(Args)]
pub struct PriorArgs {
    #[arg(long)]
    pub family: String,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Build the density with the mesh or grid recipe instead of the closed form.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub eps_tilde: Option<f64>,
    /// Grid points per axis for closed-form tables.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Table path; the sidecar goes next to it with extension .sidecar.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub u: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = DirectionArg::Above)]
    pub direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = LawArg::Truncated)]
    pub law: LawArg,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Above,
    Below,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum LawArg {
    Truncated,
    Untruncated,
}

#[derive(Args)]
pub struct TvStudyArgs {
    /// gaussian-2d or gpd-2d.
    #[arg(long)]
    pub family: String,
    /// Comma-separated mesh widths.
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("WCP_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Usage(format!("WCP_THREADS = {v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Compute(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Dist { family, theta, hyper } => commands::dist(&family, &theta, &hyper),
        Command::Prior(args) => commands::prior(&args),
        Command::Calibrate(args) => commands::calibrate(&args),
        Command::TvStudy(args) => commands::tv_study(&args),
        Command::Simulate { config, out } => commands::simulate(&config, &out),
        Command::RegenGoldens { dir, check } => commands::regen_goldens(&dir, check),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
