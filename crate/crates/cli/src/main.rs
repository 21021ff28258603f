use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use snblock::workbench::{BenchModule, Distribution};
use snblock::Parallelism;

mod block;
mod commands;
mod io;

#[derive(Parser)]
#[command(
    name = "snblock",
    version,
    about = "Sorted Neighborhood and traditional blocking for record linkage"
)]
struct Cli {
    /// Run on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with planted blocks and duplicates.
    Generate(GenerateArgs),
    /// Block a CSV dataset into candidate pairs.
    Block(BlockArgs),
    /// Order one block (all input records, or a graph dump).
    OrderBlock(OrderArgs),
    /// Check a reduction's decision equivalence on random instances.
    ReduceVerify(VerifyArgs),
    /// Time blocking over generated datasets.
    Bench(BenchArgs),
    /// Pairs completeness and recall of a candidate file.
    Score(ScoreArgs),
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// Number of blocks.
    #[arg(long)]
    u: usize,
    #[arg(long, default_value = "uniform")]
    dist: Distribution,
    #[arg(long, default_value_t = 0.1)]
    dup_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Records CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ground-truth pairs file.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    SnLocal,
    SnGlobal,
    SnMulti,
    Traditional,
    Mapreduce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Exact,
    Greedy,
    Auto,
}

/// Options given on the command line win over the config file.
#[derive(Args, Default)]
pub struct BlockArgs {
    /// `key = value` file with defaults for the options below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Records CSV, id in the first column.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Blocking key: initials, initials:0,1, first:ATTR:K, attr:ATTR, composite:A+B.
    #[arg(long)]
    key: Option<String>,
    /// jaccard, cosine or lookup:PATH (`id1 id2 score` lines).
    #[arg(long)]
    heuristic: Option<String>,
    #[arg(long, value_enum)]
    solver: Option<SolverKind>,
    /// One sn-multi pass as KEY@HEURISTIC; repeatable.
    #[arg(long = "pass")]
    passes: Vec<String>,
    #[arg(long)]
    mappers: Option<usize>,
    #[arg(long)]
    reducers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Treat the first CSV line as a header (detected when omitted).
    #[arg(long, overrides_with = "no_header")]
    header: bool,
    #[arg(long, overrides_with = "header")]
    no_header: bool,
    /// Candidate output (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run report, `key = value` lines.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Ground truth; adds pairs completeness and recall to the report.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
pub struct OrderArgs {
    /// Records CSV; every record is treated as one block.
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    input: Option<PathBuf>,
    /// Graph dump with `i j weight` lines; prints a max tour.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value = "jaccard")]
    heuristic: String,
    #[arg(long, value_enum, default_value = "auto")]
    solver: SolverKind,
    /// Exhaustive search instead of the tour solver.
    #[arg(long, conflicts_with = "graph")]
    brute_force: bool,
    #[arg(long, overrides_with = "no_header")]
    header: bool,
    #[arg(long, overrides_with = "header")]
    no_header: bool,
    /// Write the block's graph (with dummy vertex) as `i j weight` lines.
    #[arg(long, conflicts_with = "graph")]
    graph_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// 2, cor1 or 3.
    #[arg(long)]
    theorem: snblock::reductions::Theorem,
    #[arg(long, default_value_t = 200)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    /// Largest source instance (defaults: 7, or 3 for scaling).
    #[arg(long)]
    max_m: Option<usize>,
    /// Target window for scaling.
    #[arg(long, default_value_t = 3)]
    w: usize,
    /// Shift every constructed threshold (mutation testing).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    k_offset: i64,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "mapreduce")]
    module: BenchModule,
    /// Comma-separated record counts.
    #[arg(long, value_delimiter = ',', default_value = "1000,5000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    u: usize,
    /// uniform, zipf or both.
    #[arg(long, default_value = "both")]
    dist: String,
    #[arg(long, default_value_t = 0.1)]
    dup_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    reducers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PairFormat {
    /// id1,id2[,score]
    Pairs,
    /// score,id1,id2
    Scored,
}

#[derive(Args)]
pub struct ScoreArgs {
    #[arg(long)]
    candidates: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, value_enum, default_value = "pairs")]
    format: PairFormat,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<snblock::Error>())
        .map_or(1, |e| e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are contract errors; 2 is reserved for capacity
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let par = if cli.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Parallel
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Block(a) => block::run(a, par),
        Command::OrderBlock(a) => commands::order_block(a),
        Command::ReduceVerify(a) => commands::reduce_verify(a, par),
        Command::Bench(a) => commands::bench(a, par),
        Command::Score(a) => commands::score(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
