//! `revmix` — analyze finite reversible Markov chains from chain files.
//!
//! Exit codes: 0 success, 1 a checked inequality failed, 2 unusable input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use revmix_cli::chainspec::{load_chain_spec, ChainSpec, SpecError};
use revmix_cli::commands::{self, CommandOutput};
use revmix_core::conductance::ConductanceMethod;
use revmix_core::simulate::RngSeed;

#[derive(Parser)]
#[command(
    name = "revmix",
    version,
    about = "Spectral gaps, Dirichlet forms, asymptotic variance and conductance of reversible Markov chains"
)]
struct Cli {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, spectral gaps and the variance-bounding verdict.
    Analyze { file: PathBuf },

    /// Exact asymptotic variance of a named observable.
    Variance {
        file: PathBuf,
        /// Observable name from the chain file's `functions` map.
        #[arg(long)]
        function: String,
        /// Cross-check by simulating this many steps (needs --seed).
        #[arg(long, requires = "seed")]
        simulate: Option<usize>,
        /// Seed for the simulation cross-check.
        #[arg(long)]
        seed: Option<u64>,
        /// Relative tolerance of the cross-check.
        #[arg(long, default_value_t = 0.1)]
        rel_tol: f64,
    },

    /// Minimize set conductance (exact subset sweep by default).
    Conductance {
        file: PathBuf,
        /// Exhaustive enumeration (the default; caps at 24 states).
        #[arg(long, conflicts_with = "sampled")]
        exact: bool,
        /// Sample this many random subsets instead (needs --seed).
        #[arg(long, requires = "seed")]
        sampled: Option<usize>,
        /// Seed for sampled mode.
        #[arg(long)]
        seed: Option<u64>,
    },

    /// Verify the Cheeger bounds tying conductance to the right gap.
    Cheeger { file: PathBuf },

    /// Flow-ratio certificate and gap/variance orderings of two chains.
    Compare {
        file1: PathBuf,
        file2: PathBuf,
        /// Observable (from the first file) for the variance ordering.
        #[arg(long)]
        function: String,
    },

    /// Sample a stationary trajectory and estimate the asymptotic variance.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        function: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(output) => {
            match cli.format {
                Format::Text => print!("{}", output.text),
                Format::Json => print!("{}", output.json.to_json()),
            }
            if output.verdict_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(command: &Command) -> Result<CommandOutput, SpecError> {
    match command {
        Command::Analyze { file } => commands::analyze(&load(file)?),
        Command::Variance {
            file,
            function,
            simulate,
            seed,
            rel_tol,
        } => {
            let simulation = simulate.map(|steps| (steps, seed.expect("required"), *rel_tol));
            commands::variance_cmd(&load(file)?, function, simulation)
        }
        Command::Conductance {
            file,
            exact: _,
            sampled,
            seed,
        } => {
            let method = match sampled {
                Some(samples) => ConductanceMethod::Sampled {
                    samples: *samples,
                    seed: RngSeed(seed.expect("required")),
                },
                None => ConductanceMethod::Exact,
            };
            commands::conductance_cmd(&load(file)?, method)
        }
        Command::Cheeger { file } => commands::cheeger(&load(file)?),
        Command::Compare {
            file1,
            file2,
            function,
        } => commands::compare(&load(file1)?, &load(file2)?, function),
        Command::Simulate {
            file,
            steps,
            seed,
            function,
        } => commands::simulate_cmd(&load(file)?, *steps, *seed, function),
    }
}

fn load(path: &Path) -> Result<ChainSpec, SpecError> {
    load_chain_spec(path)
}
