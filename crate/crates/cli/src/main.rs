//! Command-line front end: graph generation, counting, property reports,
//! single reductions and configured experiments.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status when rows were written but some runs failed.
pub const EXIT_ROW_FAILURES: u8 = 3;
/// Exit status for configuration and input errors.
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "quasirand", version, about = "Quasirandomness measurements for graphs")]
pub struct Cli {
    /// Seed for generators and samplers (overrides config seeds).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for written files (overrides the config's output_dir).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated graph to a file.
    Gen(GenArgs),
    /// Count constrained homomorphisms of a pattern into a graph.
    Count(CountArgs),
    /// Evaluate every quasirandomness property of a graph.
    Report(ReportArgs),
    /// Run one reduction procedure.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Run an experiment config.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    ErdosRenyi,
    PlantedDense,
    Complete,
    Empty,
    CompleteBipartite,
    Cycle,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "erdos-renyi")]
    pub kind: KindArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub plant_fraction: f64,
    #[arg(long, default_value_t = 0.0)]
    pub plant_boost: f64,
    /// Output graph file (default: <output-dir>/graph.txt).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the planted set, when there is one.
    #[arg(long)]
    pub plant_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PatternGraph {
    /// Preset (K3, C4, P3, ..) or a pattern file.
    #[arg(long)]
    pub pattern: String,
    /// Graph file: `n m` header then one `u v` edge per line.
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub input: PatternGraph,
    /// One vertex-set file per pattern vertex; omitted means all of V.
    #[arg(long = "set", num_args = 1..)]
    pub sets: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value = "K3")]
    pub pattern: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
}

#[derive(Debug, Subcommand)]
pub enum ReduceCommand {
    /// Three-term split of an overlapping constraint pair.
    OverlapSplit {
        #[command(flatten)]
        input: PatternGraph,
        #[arg(long = "set", num_args = 1..)]
        sets: Vec<PathBuf>,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
    /// Expected count over random equitable bipartitions of a shared set.
    Bipartition {
        #[command(flatten)]
        input: PatternGraph,
        #[arg(long = "set", num_args = 1..)]
        sets: Vec<PathBuf>,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Estimate a count using only disjoint-tuple counts.
    Disjointify {
        #[command(flatten)]
        input: PatternGraph,
        #[arg(long = "set", num_args = 1..)]
        sets: Vec<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Use the plain 4E term instead of the exact diagonal correction.
        #[arg(long)]
        literal: bool,
    },
    /// Check the filtration telescope against the measured edge deviation.
    CountingLemma {
        #[command(flatten)]
        input: PatternGraph,
        #[arg(long)]
        p: f64,
        #[arg(long = "set", num_args = 1..)]
        sets: Vec<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Search for a half-size set of large discrepancy.
    HalfSet {
        #[arg(long)]
        graph: PathBuf,
        /// Seed set S.
        #[arg(long)]
        set: PathBuf,
        /// Reference density (default: the graph's own).
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Amplify the discrepancy of S into two disjoint quarter-size sets.
    Amplify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 0.02)]
        slack: f64,
        #[arg(long, default_value_t = 0.05)]
        size_slack: f64,
        #[arg(long, default_value_t = 10)]
        max_retries: usize,
    },
    /// Both sides of the power-sum inequality.
    PowerSum {
        /// Comma-separated naturals.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        a: Vec<u64>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        b: Vec<u64>,
        #[arg(long)]
        r: u32,
    },
    /// Sum over ordered pairs of |d^r(u) - d^r(v)|.
    DegreePower {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        r: u32,
    },
    /// Doubled-count trace of the degree-power bound.
    MainLemma {
        #[command(flatten)]
        input: PatternGraph,
        #[arg(long)]
        p: f64,
        /// Labelled deviation to check against; measured over sampled plus
        /// proof tuples when omitted.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// TOML experiment config.
    pub config: PathBuf,
    /// Validate and print the plan without running.
    #[arg(long)]
    pub dry_run: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
