use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dispatch::SolverKind;

#[derive(Parser, Debug)]
#[command(name = "embed", about = "Non-contracting low-distortion graph embeddings", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide an instance and print the embedding as JSON, or `infeasible`.
    Solve(SolveArgs),
    /// Check an embedding JSON against a guest, a host and a distortion.
    Verify(VerifyArgs),
    /// Run the exhaustive search directly.
    Oracle(OracleArgs),
    /// Write hosts, decompositions, random guests, corpora or reduction instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run solvers over instances and emit CSV rows.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Guest edge list.
    #[arg(long)]
    pub graph: PathBuf,
    /// cycle:N | path:N | theta:l1,...,lk | file:PATH
    #[arg(long)]
    pub host: String,
    /// PACE tree decomposition of the host.
    #[arg(long)]
    pub td: Option<PathBuf>,
    /// Guest edge list carries weights as a third column.
    #[arg(long)]
    pub weighted: bool,
    /// Require the embedding to be onto the host.
    #[arg(long)]
    pub bijective: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct LimitArgs {
    /// Cap on dynamic-programming states.
    #[arg(long)]
    pub max_states: Option<u64>,
    /// Cap on exhaustive-search nodes.
    #[arg(long, default_value_t = 50_000_000)]
    pub oracle_nodes: u64,
    /// Wall-clock limit for exhaustive search, in seconds.
    #[arg(long, default_value_t = 60)]
    pub time_limit: u64,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Integer d, or a/b for the scaling reduction (contraction allowed).
    #[arg(long)]
    pub distortion: String,
    /// auto|cycle|line|tw|ctw|theta|oracle
    #[arg(long, default_value = "auto")]
    pub solver: SolverKind,
    /// Write the host with the embedding as DOT.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[command(flatten)]
    pub limits: LimitArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Embedding JSON as printed by `solve`.
    #[arg(long)]
    pub embedding: PathBuf,
    /// Integer d (non-contracting check), or a/b (general distortion check).
    #[arg(long)]
    pub distortion: String,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Integer d, or a/b to allow contraction.
    #[arg(long, required_unless_present = "max_distortion", conflicts_with = "max_distortion")]
    pub distortion: Option<String>,
    /// Report the least integer distortion up to this bound instead.
    #[arg(long)]
    pub max_distortion: Option<u32>,
    #[command(flatten)]
    pub limits: LimitArgs,
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// Edge list (or DOT, or a PACE decomposition) of a host.
    Host {
        /// cycle:N | path:N | theta:l1,...,lk
        spec: String,
        /// Print DOT instead of an edge list.
        #[arg(long, conflicts_with = "td")]
        dot: bool,
        /// Print a PACE tree decomposition instead of an edge list.
        #[arg(long)]
        td: bool,
    },
    /// A random connected guest.
    Random {
        /// Number of vertices.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        /// Edges added on top of a random spanning tree.
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Every graph of a family on `n` vertices, one file each.
    Corpus {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Family::Connected)]
        family: Family,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Hosts of the scaling reduction, with red vertex lists.
    Reduction {
        /// Guest edge list.
        #[arg(long)]
        graph: PathBuf,
        /// cycle:N | path:N | theta:l1,...,lk | file:PATH
        #[arg(long)]
        host: String,
        /// Target distortion a/b, or an integer.
        #[arg(long)]
        distortion: String,
        /// Guest edge list carries weights as a third column.
        #[arg(long)]
        weighted: bool,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Connected,
    Trees,
    Unicyclic,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Guest edge lists; combined with --corpus if both are given.
    #[arg(long)]
    pub graph: Vec<PathBuf>,
    /// All connected guests on 2..=N vertices.
    #[arg(long)]
    pub corpus: Option<usize>,
    /// Host specs; repeat for several.
    #[arg(long, required = true)]
    pub host: Vec<String>,
    /// Integer distortions; repeat for several.
    #[arg(long, required = true)]
    pub distortion: Vec<u32>,
    /// Comma-separated list of auto|cycle|line|tw|ctw|theta|oracle.
    #[arg(long, value_delimiter = ',', default_value = "auto")]
    pub solver: Vec<SolverKind>,
    /// Guest edge lists carry weights as a third column.
    #[arg(long)]
    pub weighted: bool,
    /// Require embeddings onto the host.
    #[arg(long)]
    pub bijective: bool,
    #[command(flatten)]
    pub limits: LimitArgs,
}
