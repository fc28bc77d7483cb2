mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Output};

/// Real components of lattices with involution, their mod-2 duality, and
/// SL(2)/PGL(2) component counts for spectral curves.
#[derive(Parser, Debug)]
#[command(name = "prym-census", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Largest lattice rank accepted.
    #[arg(long, default_value_t = commands::DEFAULT_RANK_GUARD, global = true)]
    rank_guard: usize,
    /// Largest number of real circles accepted.
    #[arg(long, default_value_t = commands::DEFAULT_K_GUARD, global = true)]
    k_guard: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose an involution and list its real component group.
    Components {
        #[arg(long)]
        matrix: PathBuf,
        /// Include a unimodular matrix conjugating T to block form.
        #[arg(long)]
        witness: bool,
        /// Also count components with the independent coset oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Compute the mod-2 pairing between component groups and check perfectness.
    Pairing {
        #[arg(long)]
        matrix: PathBuf,
        /// Dual involution; defaults to the transpose of T.
        #[arg(long, requires = "pairing")]
        dual: Option<PathBuf>,
        /// Pairing matrix P with <x, y> = y^T P x; defaults to the identity.
        #[arg(long, requires = "dual")]
        pairing: Option<PathBuf>,
    },
    /// Build the spectral-curve homology and count real components.
    Spectral {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
        /// Write the matrices of i_* and tau_* with basis labels to this file.
        #[arg(long)]
        emit_matrices: Option<PathBuf>,
    },
    /// Global SL(2) and PGL(2) census for k real circles.
    Census {
        #[arg(long, required_unless_present = "max_k", conflicts_with = "max_k")]
        k: Option<usize>,
        /// Fixes a fiber and adds the fiber bound and paradox report.
        #[arg(long, requires = "k")]
        ell: Option<usize>,
        /// Genus for the paradox report; defaults to the smallest valid one.
        #[arg(long, requires = "ell")]
        g: Option<usize>,
        /// Sweep k = 1..=MAX_K instead.
        #[arg(long)]
        max_k: Option<usize>,
    },
    /// Spectral counts over every valid (g, k, ell) with g in a range.
    Sweep {
        #[arg(long, default_value_t = 3)]
        g_min: usize,
        #[arg(long, default_value_t = 5)]
        g_max: usize,
    },
    /// Run the seeded invariant suites of every module.
    Selftest {
        #[arg(long, env = "PRYM_CENSUS_SEED", default_value_t = prym_census::selftest::DEFAULT_SEED)]
        seed: u64,
        /// Feed a non-involution through the pipeline; the run must fail.
        #[arg(long)]
        inject_fault: bool,
    },
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Components { matrix, witness, oracle } => commands::components(g, matrix, *witness, *oracle),
        Command::Pairing { matrix, dual, pairing } => {
            commands::pairing(g, matrix, dual.as_deref().zip(pairing.as_deref()))
        }
        Command::Spectral { g: genus, k, ell, emit_matrices } => {
            commands::spectral(g, *genus, *k, *ell, emit_matrices.as_deref())
        }
        Command::Census { k, ell, g: genus, max_k } => match (k, max_k) {
            (_, Some(max_k)) => commands::census_sweep(g, *max_k),
            (Some(k), None) => commands::census(g, *k, *ell, *genus),
            (None, None) => unreachable!("clap requires --k or --max-k"),
        },
        Command::Sweep { g_min, g_max } => commands::sweep(g, *g_min, *g_max),
        Command::Selftest { seed, inject_fault } => commands::selftest(*seed, *inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    commands::warn_on_guards(&cli.global);
    match dispatch(&cli).and_then(|out| commands::emit(&cli.global, &out).map(|()| out)) {
        Ok(out) => {
            if let Some(msg) = &out.failure {
                eprintln!("{msg}");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
