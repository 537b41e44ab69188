mod commands;
mod output;
mod selfcheck;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "ufg",
    version,
    about = "Depth analysis for samples of partial orders"
)]
struct Cli {
    /// Worker threads for parallel stages; defaults to one per core.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build dominance posets from a performance table.
    Ingest(IngestArgs),
    /// Family, depth map, persistence and dispersion for a poset sample.
    Analyze(AnalyzeArgs),
    /// Rank shift between depth maps of two measure subsets.
    Compare(CompareArgs),
    /// Fit the Davidson model to a poset sample.
    Davidson(DavidsonArgs),
    /// Count (and optionally list) all posets on m items.
    Enumerate(EnumerateArgs),
    /// Deepest or shallowest posets by branch and bound.
    Extremal(ExtremalArgs),
    /// Run the property suites at desk scale.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args, Clone)]
struct TableArgs {
    /// Performance CSV with header `dataset,algorithm,measure,value`.
    #[arg(long)]
    input: PathBuf,
    /// Lines of `measure: higher|lower`.
    #[arg(long)]
    orientations: PathBuf,
    /// Treat values within this distance as equal. Off by default.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Largest universe for which every poset is enumerated.
    #[arg(long, default_value_t = ufg_core::poset::DEFAULT_ENUM_LIMIT)]
    enum_limit: usize,
    /// Override the cardinality cap on family sets.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value_t = 600)]
    timeout_secs: u64,
}

#[derive(Args)]
pub struct IngestArgs {
    #[command(flatten)]
    table: TableArgs,
    /// Comma-separated subset of measures; all by default.
    #[arg(long, value_delimiter = ',')]
    measures: Option<Vec<String>>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Poset sample file.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    family: FamilyArgs,
    /// Posets reported at each end when the universe is too large to enumerate.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    alpha: Vec<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
pub struct CompareArgs {
    #[command(flatten)]
    table: TableArgs,
    /// First measure subset.
    #[arg(long, value_delimiter = ',', required = true)]
    measures: Vec<String>,
    /// Second measure subset; all measures by default.
    #[arg(long, value_delimiter = ',')]
    against: Option<Vec<String>>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
pub struct DavidsonArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = ufg_core::poset::DEFAULT_ENUM_LIMIT)]
    enum_limit: usize,
    /// Also write every poset to `posets-<m>.txt` here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Max,
    Min,
}

#[derive(Args)]
pub struct ExtremalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "max")]
    direction: DirectionArg,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[command(flatten)]
    family: FamilyArgs,
    /// Also write the 0-1 program in CPLEX LP format.
    #[arg(long)]
    lp: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
pub struct SelfcheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random samples per suite.
    #[arg(long, default_value_t = 60)]
    samples: usize,
    /// Enumerate families with a deliberately unsound pruning rule.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.into())
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Compare(a) => commands::compare(a),
        Command::Davidson(a) => commands::davidson(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Extremal(a) => commands::extremal(a),
        Command::Selfcheck(a) => selfcheck::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
