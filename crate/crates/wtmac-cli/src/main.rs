//! `wtmac`: rate regions, code simulation and case studies for the
//! wiretap multiple-access channel.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use io::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "wtmac",
    version,
    about = "Wiretap MAC rate regions and code simulation"
)]
pub struct Cli {
    /// Seed for every randomized step; echoed in the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Channel file `{"x","y","t","z","rows"}`.
    #[arg(long)]
    pub channel: PathBuf,
    /// Input factors file `{"p_u","v1_given_u","v2_given_u","x_given_v1","y_given_v2"}`.
    #[arg(long)]
    pub p: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct CodeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Region case 0..3.
    #[arg(long)]
    pub case: usize,
    /// Target rates `R0,R1,R2`.
    #[arg(long, value_delimiter = ',', value_name = "R0,R1,R2", required = true)]
    pub rates: Vec<f64>,
    /// Common randomness per channel use.
    #[arg(long, default_value_t = 0.0)]
    pub hc: f64,
    /// Blocklength of the first block.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Blocklength of the second (time-sharing) block; 0 for none.
    #[arg(long, default_value_t = 0)]
    pub n_prime: usize,
    /// Typicality parameter δ.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Randomization rate slack above the leakage terms.
    #[arg(long, default_value_t = 0.05)]
    pub slack: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PredicateArg {
    TimeSharing,
    Conferencing,
    Never,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Information quantities of an input.
    Info(InputArgs),
    /// Applicable region cases and α-intervals.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0.0)]
        hc: f64,
    },
    /// Common-randomness rate region.
    Region {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0.0)]
        hc: f64,
        /// Restrict to one case; default is every applicable case.
        #[arg(long)]
        case: Option<usize>,
        /// Also write vertices and constraints as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Conferencing rate region.
    ConfRegion {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0.0)]
        c1: f64,
        #[arg(long, default_value_t = 0.0)]
        c2: f64,
        #[arg(long)]
        case: Option<usize>,
        /// α values for the Case-2 union.
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Inner estimate of the achievable region by input search.
    Optimize {
        #[arg(long)]
        channel: PathBuf,
        /// Common-randomness mode (default when no capacities are given).
        #[arg(long, conflicts_with_all = ["c1", "c2"])]
        hc: Option<f64>,
        /// Conferencing mode.
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        /// Only independent channel inputs (|U| = 1).
        #[arg(long)]
        independent: bool,
        /// Use V1 = X, V2 = Y.
        #[arg(long)]
        no_prefixing: bool,
        #[arg(long)]
        u_size: Option<usize>,
        #[arg(long)]
        v1_size: Option<usize>,
        #[arg(long)]
        v2_size: Option<usize>,
        #[arg(long, default_value_t = 64)]
        directions: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        refine_iters: usize,
        #[arg(long, default_value_t = 21)]
        alpha_grid: usize,
        #[arg(long, default_value_t = 5_000_000)]
        max_evaluations: u64,
        /// Also estimate `max I(T∧V1V2) − I(Z∧V1V2)`.
        #[arg(long)]
        single_sender: bool,
        /// Write the point cloud as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build a random wiretap code and evaluate error and leakage.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        /// Monte Carlo error trials; exact evaluation when absent.
        #[arg(long)]
        trials: Option<usize>,
        /// Fallback Monte Carlo leakage trials.
        #[arg(long, default_value_t = 10_000)]
        leakage_trials: usize,
        /// Write the codebooks as CSV.
        #[arg(long)]
        codebook_csv: Option<PathBuf>,
    },
    /// Eve's leakage, variation and MAP error for a random code.
    Leakage {
        #[command(flatten)]
        code: CodeArgs,
        /// Monte Carlo leakage trials; exact evaluation when absent.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Random checks of the union and convex-hull decomposition lemmas.
    VerifyLemmas {
        /// Instances per lemma.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Rate points per instance.
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 1e-3)]
        alpha_step: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Binary discussion channels: equal-input witness and concavity scan.
    Example61 {
        #[arg(long, default_value_t = 99)]
        grid: usize,
    },
    /// Binary time-sharing example with both role assignments.
    Example62,
    /// Random search for channels with a certified property.
    Search {
        #[arg(long, value_enum, default_value_t = PredicateArg::TimeSharing)]
        predicate: PredicateArg,
        /// Channels examined at most.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        max_found: usize,
        /// Margin from the ends of [0, 1] for time-sharing.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Concavity check grid for conferencing.
        #[arg(long, default_value_t = 9)]
        grid: usize,
        /// Required advantage of the correlated input for conferencing.
        #[arg(long, default_value_t = 1e-3)]
        margin: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Info(_) => "info",
            Command::Classify { .. } => "classify",
            Command::Region { .. } => "region",
            Command::ConfRegion { .. } => "conf-region",
            Command::Optimize { .. } => "optimize",
            Command::Simulate { .. } => "simulate",
            Command::Leakage { .. } => "leakage",
            Command::VerifyLemmas { .. } => "verify-lemmas",
            Command::Example61 { .. } => "example61",
            Command::Example62 => "example62",
            Command::Search { .. } => "search",
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("WTMAC_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Input(format!(
            "WTMAC_THREADS must be a positive integer, got '{v}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Output(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
