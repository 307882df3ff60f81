//! `sepx`: graph edit distance, variation operators, LBEI grids, and
//! evolutionary search from the command line.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;
use sepx_core::seed::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "sepx", version, about = "Shortest-edit-path crossover toolkit")]
struct Cli {
    /// Worker threads for grid and batch commands (0 = all cores).
    #[arg(long, global = true, env = "SEPX_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct SeedArg {
    /// Master seed.
    #[arg(long, env = "SEPX_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact graph edit distance between two graph files.
    Ged {
        a: PathBuf,
        b: PathBuf,
        /// Largest extended order the solver accepts.
        #[arg(long, default_value_t = sepx_core::ged::DEFAULT_MAX_ORDER)]
        max_order: usize,
        /// Emit JSON (the default and only format).
        #[arg(long)]
        json: bool,
    },
    /// Cross two parents and print the offspring.
    Crossover {
        #[arg(long, value_enum, default_value_t = CrossoverArg::Sep)]
        mode: CrossoverArg,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = sepx_core::ged::DEFAULT_MAX_ORDER)]
        max_order: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Mutate a graph and print the offspring.
    Mutate {
        a: PathBuf,
        /// Per-entry mutation probability; defaults to 1/(n(n-1)) for the
        /// padded order n.
        #[arg(long)]
        pm: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        alphabet: Vec<u32>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Monte Carlo LBEI grid as CSV.
    SimulateLbei(LbeiArgs),
    /// Batch of Regularized Evolution runs toward a target graph.
    Search(SearchArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CrossoverArg {
    Sep,
    SepBernoulli,
    Std,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SpaceArg {
    Nas101,
    Nasnlp,
    Custom,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum NseArg {
    Consistent,
    AsStated,
}

#[derive(Args, Debug)]
struct LbeiArgs {
    #[arg(long, value_enum, default_value_t = SpaceArg::Nas101)]
    space: SpaceArg,
    /// Graph order (custom space).
    #[arg(long)]
    n: Option<usize>,
    /// Edges in the optimum (custom space).
    #[arg(long)]
    nopt1: Option<usize>,
    /// Edges in parent 1 (custom space).
    #[arg(long)]
    n11: Option<usize>,
    /// Edges in parent 2 (custom space).
    #[arg(long)]
    n21: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = NseArg::Consistent)]
    nse_mode: NseArg,
    /// Mutation rate; defaults to 1/(n(n-1)).
    #[arg(long)]
    pm: Option<f64>,
    /// Largest d1 on the grid.
    #[arg(long)]
    d1_max: Option<usize>,
    /// Largest d2 on the grid.
    #[arg(long)]
    d2_max: Option<usize>,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FitnessArg {
    Ged,
    NoisyGed,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OperatorArg {
    Mutation,
    StdX,
    SepX,
    Random,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ValidityArg {
    DagIo,
    None,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    target: PathBuf,
    #[arg(long, value_enum, default_value_t = FitnessArg::Ged)]
    fitness: FitnessArg,
    #[arg(long, default_value_t = 0.0)]
    noise_sd: f64,
    #[arg(long, value_enum, default_value_t = OperatorArg::SepX)]
    operator: OperatorArg,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 10)]
    tournament: usize,
    #[arg(long, default_value_t = 10_000)]
    evals: usize,
    #[arg(long, default_value_t = 50)]
    runs: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    alphabet: Vec<u32>,
    #[arg(long, value_enum, default_value_t = ValidityArg::DagIo)]
    validity: ValidityArg,
    #[arg(long, default_value_t = 7)]
    max_vertices: usize,
    #[arg(long, default_value_t = 9)]
    max_edges: usize,
    /// Checkpoint spacing for the summary quartiles.
    #[arg(long, default_value_t = 100)]
    checkpoint: usize,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    seed: SeedArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure threads: {e}")))?;
    }
    match cli.command {
        Command::Ged {
            a,
            b,
            max_order,
            json: _,
        } => commands::ged(&a, &b, max_order),
        Command::Crossover {
            mode,
            a,
            b,
            max_order,
            seed,
        } => commands::crossover(mode, &a, &b, max_order, seed.seed),
        Command::Mutate {
            a,
            pm,
            alphabet,
            seed,
        } => commands::mutate(&a, pm, alphabet, seed.seed),
        Command::SimulateLbei(args) => commands::simulate_lbei(&args),
        Command::Search(args) => commands::search(&args),
    }
}
