//! `privsense`: runs the verification, privacy, estimation and protocol
//! experiments and writes their data as CSV / JSON.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Format, NoiseChoice, StateChoice};

#[derive(Parser, Debug)]
#[command(name = "privsense", version, about = "Verification and private phase sensing with GHZ states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every command that writes artifacts.
#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// JSON run configuration; flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed. Required for sampling commands unless --random-seed is given
    #[arg(long, conflicts_with = "random_seed")]
    pub seed: Option<u64>,
    /// Draw a seed from the OS and print it
    #[arg(long)]
    pub random_seed: bool,
    /// Output directory [default: .]
    #[arg(long, env = "PRIVSENSE_OUT", value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel stages
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Table format; JSON reports are always written
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// Number of qubits / nodes [default: 3]
    #[arg(long)]
    pub n: Option<usize>,
    /// Base state before noise [default: ghz]
    #[arg(long, value_enum)]
    pub state: Option<StateChoice>,
    /// Noise channel applied to the base state
    #[arg(long, value_enum)]
    pub noise: Option<NoiseChoice>,
    /// Noise strength in [0, 1]; for paper-mixture, p = 1 - strength
    #[arg(long)]
    pub strength: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Statistical strength in N_t = ceil(2 m n^5 ln n) [default: 1]
    #[arg(long)]
    pub m: Option<f64>,
    /// Confidence trade-off parameter c [default: 0]
    #[arg(long)]
    pub c: Option<f64>,
    /// Fixed number of tests per stabilizer instead of N_t/2 overall
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct EstimationArgs {
    /// Local phases theta_1..theta_n in radians, comma separated [default: pi/2 on node 1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phases: Option<Vec<f64>>,
    /// Sensing rounds
    #[arg(long)]
    pub nu: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceChoice {
    Honest,
    SwapPlus,
    /// Swaps only untested copies; reads the verifier's selection (unsound)
    SelectionAwareSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifierChoice {
    Node1,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TranscriptChoice {
    Full,
    Summary,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the n + 1 signed stabilizer strings, one per line
    Stabilizers {
        /// Number of qubits
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Run one stabilizer verification and report f and the derived bounds
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        verification: VerifyArgs,
    },
    /// Direct privacy parameter and global-phase QFI of a state
    Privacy {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Parity estimation of the global phase, optionally with a variance scan
    Estimate {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        verification: VerifyArgs,
        #[command(flatten)]
        estimation: EstimationArgs,
        /// Round counts for the variance scan, comma separated
        #[arg(long, value_delimiter = ',')]
        nu_grid: Option<Vec<usize>>,
        /// Repetitions per grid point in the variance scan [default: 200]
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Exact failure rate, fidelity and fidelity bound across noise strengths
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Number of qubits [default: 3]
        #[arg(long)]
        n: Option<usize>,
        /// Noise channel [default: paper-mixture]
        #[arg(long, value_enum)]
        noise: Option<NoiseChoice>,
        /// Evenly spaced strengths covering [0, 1]
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Histogram of failure rates over repeated verification rounds
    Histogram {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        state: StateArgs,
        /// Shots per round, spread over all stabilizers
        #[arg(long, default_value_t = 3204)]
        shots_per_round: usize,
        /// Number of rounds
        #[arg(long, default_value_t = 3200)]
        rounds: usize,
        /// Number of equal-width bins
        #[arg(long, default_value_t = 40)]
        bins: usize,
    },
    /// Multi-party protocol run, or the swap-adversary experiment with --q-grid
    Protocol {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        verification: VerifyArgs,
        #[command(flatten)]
        estimation: EstimationArgs,
        /// 1: verification only; 2: verification followed by sensing, nu times
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        protocol: u8,
        /// Source behaviour
        #[arg(long, value_enum, default_value_t = SourceChoice::Honest)]
        source: SourceChoice,
        /// Swap probability per copy
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        /// Verifier placement
        #[arg(long, value_enum, default_value_t = VerifierChoice::Node1)]
        verifier: VerifierChoice,
        /// Keep every message, or only counts
        #[arg(long, value_enum, default_value_t = TranscriptChoice::Full)]
        transcript: TranscriptChoice,
        /// Swap fractions for the adversary experiment, comma separated
        #[arg(long, value_delimiter = ',')]
        q_grid: Option<Vec<f64>>,
        /// Trials per swap fraction
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// Evaluate the closed-form bounds for a given failure rate
    Bounds {
        #[command(flatten)]
        run: RunArgs,
        /// Number of qubits [default: 3]
        #[arg(long)]
        n: Option<usize>,
        /// Failure rate
        #[arg(long)]
        f: f64,
        /// Confidence trade-off parameter [default: 0]
        #[arg(long)]
        c: Option<f64>,
        /// Statistical strength; adds N_t, the c window and the confidence
        #[arg(long)]
        m: Option<f64>,
        /// Phase for the accuracy and precision bounds
        #[arg(long)]
        phi: Option<f64>,
        /// Sensing rounds for the precision bound [default: 1000]
        #[arg(long)]
        nu: Option<usize>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(privsense::Error),
}

impl From<privsense::Error> for CliError {
    fn from(e: privsense::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use privsense::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Singularity { .. }) => 3,
            CliError::Core(E::Dimension(_) | E::SizeLimit { .. } | E::Validation(_) | E::InvalidParameter { .. }) => 2,
            CliError::Core(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Stabilizers { n } => commands::stabilizers(n),
        Command::Verify { run, state, verification } => commands::verify(&run, &state, &verification),
        Command::Privacy { run, state } => commands::privacy(&run, &state),
        Command::Estimate {
            run,
            state,
            verification,
            estimation,
            nu_grid,
            repetitions,
        } => commands::estimate(&run, &state, &verification, &estimation, nu_grid, repetitions),
        Command::Sweep { run, n, noise, points } => commands::sweep(&run, n, noise, points),
        Command::Histogram {
            run,
            state,
            shots_per_round,
            rounds,
            bins,
        } => commands::histogram(&run, &state, shots_per_round, rounds, bins),
        Command::Protocol {
            run,
            state,
            verification,
            estimation,
            protocol,
            source,
            q,
            verifier,
            transcript,
            q_grid,
            trials,
        } => commands::protocol(
            &run,
            &state,
            &verification,
            &estimation,
            commands::ProtocolOptions {
                protocol,
                source,
                q,
                verifier,
                transcript,
                q_grid,
                trials,
            },
        ),
        Command::Bounds { run, n, f, c, m, phi, nu } => commands::bounds(&run, n, f, c, m, phi, nu),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
