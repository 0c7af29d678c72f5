use std::path::PathBuf;
use std::process::ExitCode;

use causanet::timing::GatePolicy;
use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod repl;

use commands::CliError;

#[derive(Parser)]
#[command(
    name = "causanet",
    version,
    about = "Timed, stochastic and fuzzy Petri nets for causal scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Centroid,
    Sampled,
}

impl From<Policy> for GatePolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Centroid => GatePolicy::Centroid,
            Policy::Sampled => GatePolicy::Sampled,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fused,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded simulations and summarise them.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        net: Option<String>,
        #[arg(long, default_value_t = 100.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Policy::Centroid)]
        policy: Policy,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Trace file for a single run, directory for several.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Play the token game interactively on standard input.
    Step {
        file: PathBuf,
        #[arg(long)]
        net: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the reachability graph and report deadlocks.
    Reach {
        file: PathBuf,
        #[arg(long)]
        net: Option<String>,
        #[arg(long, default_value_t = causanet::puzzles::MAX_NODES)]
        max_nodes: usize,
        #[arg(long, default_value_t = causanet::puzzles::MAX_TOKENS)]
        max_tokens: u32,
        /// Also check k-boundedness.
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Check the expectations of built-in scenarios.
    Puzzle {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        all: bool,
        #[arg(long, conflicts_with_all = ["name", "all"])]
        list: bool,
    },
    /// Minimise a truth table to a sum of products.
    Minimize { file: PathBuf },
    /// Probability along a causal chain.
    Chain {
        file: PathBuf,
        #[arg(long)]
        graph: Option<String>,
        /// Comma-separated node path, e.g. X,Y,Z.
        #[arg(long, value_delimiter = ',', required = true)]
        path: Vec<String>,
        #[arg(long, value_enum, default_value_t = Mode::Fused)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Iterate a fuzzy cognitive map.
    Fcm {
        file: PathBuf,
        #[arg(long)]
        map: Option<String>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Write Graphviz DOT for a model.
    ExportDot {
        file: PathBuf,
        /// Model name; defaults to the first model in the file.
        #[arg(long)]
        name: Option<String>,
        /// Export the reachability graph of the net instead.
        #[arg(long)]
        reach: bool,
    },
    /// Parse and validate a model file.
    Validate { file: PathBuf },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            file,
            net,
            horizon,
            runs,
            seed,
            policy,
            max_steps,
            trace_out,
        } => commands::simulate(&commands::SimulateArgs {
            file,
            net,
            horizon,
            runs,
            seed,
            policy: policy.into(),
            max_steps,
            trace_out,
        }),
        Command::Step { file, net, seed } => {
            let net = commands::load_net(&file, net.as_deref())?;
            let stdin = std::io::stdin();
            repl::run(&net, seed, stdin.lock(), std::io::stdout().lock()).map_err(|e| CliError::Runtime(e.to_string()))
        }
        Command::Reach {
            file,
            net,
            max_nodes,
            max_tokens,
            bound,
        } => commands::reach(&file, net.as_deref(), max_nodes, max_tokens, bound),
        Command::Puzzle { name, all, list } => commands::puzzle(name.as_deref(), all, list),
        Command::Minimize { file } => commands::minimize(&file),
        Command::Chain {
            file,
            graph,
            path,
            mode,
            seed,
        } => commands::chain(&file, graph.as_deref(), &path, matches!(mode, Mode::Sampled), seed),
        Command::Fcm { file, map, steps } => commands::fcm(&file, map.as_deref(), steps),
        Command::ExportDot { file, name, reach } => commands::export_dot(&file, name.as_deref(), reach),
        Command::Validate { file } => commands::validate(&file),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
