use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;

use io::CliError;

/// Generate, draw, degrade, encode, reconstruct and score plank-assembly
/// cabinets.
#[derive(Debug, Parser)]
#[command(name = "plankforge", version)]
struct Cli {
    /// Worker threads for commands that process many samples.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic cabinet dataset.
    Gen(GenArgs),
    /// Project a program to its three-view drawing JSON.
    Project(ProjectArgs),
    /// Corrupt a drawing with edge deletions and endpoint shifts.
    Noise(NoiseArgs),
    /// Encode a program and its drawing as one JSONL sample.
    Encode(EncodeArgs),
    /// Decode the output tokens of JSONL samples back into programs.
    Decode(DecodeArgs),
    /// Reconstruct planks from a drawing (or a directory of drawings).
    Recon(ReconArgs),
    /// Score predictions against ground-truth programs.
    Eval(EvalArgs),
    /// Write OBJ or SVG files.
    Export(ExportArgs),
    /// Print plank, edge and hidden-fraction histograms of a dataset.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset root; receives `{train,val,test}/` and `{split}.jsonl`.
    #[arg(long, default_value = "dataset")]
    out: PathBuf,
    /// Train, val and test fractions.
    #[arg(long, value_delimiter = ',', default_values_t = [0.8, 0.1, 0.1])]
    splits: Vec<f64>,
    /// Generator config JSON; missing fields keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    /// `.plank` text or program JSON.
    program: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG rendering.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    drawing: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    noise_ratio: f64,
    #[arg(long, default_value_t = 0.5)]
    delete_prob: f64,
    #[arg(long, default_value_t = 0.1)]
    max_shift_frac: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop hidden edges after corruption.
    #[arg(long)]
    visible_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    program: PathBuf,
    /// Drawing JSON; the program is projected when absent.
    #[arg(long)]
    drawing: Option<PathBuf>,
    /// Sample id; defaults to the program file stem.
    #[arg(long)]
    id: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    /// JSONL file of samples.
    input: PathBuf,
    /// Directory for `{id}.plank`; required unless the file holds one sample.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    /// Search for block subsets that re-project exactly.
    Verify,
    /// Keep every candidate block.
    Union,
}

#[derive(Debug, Args)]
struct ReconArgs {
    /// Drawing JSON, or a directory of `{id}.drawing.json` files.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Variant::Verify)]
    variant: Variant,
    #[arg(long, default_value_t = 300)]
    timeout_secs: u64,
    /// Pick a random minimum-size match with this seed instead of the first.
    #[arg(long)]
    sample_solution: Option<u64>,
    /// Ground truth (`.plank`, or a directory for batch input) used to group
    /// blocks into plank predictions.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Solution JSON file, or the output directory for batch input.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the solution boxes as OBJ (single drawing only).
    #[arg(long)]
    obj: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AveragingArg {
    Macro,
    Micro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FailuresArg {
    /// Failed reconstructions score zero.
    Zero,
    /// Failed reconstructions are left out of the mean.
    Exclude,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    iou_thresh: f64,
    #[arg(long, value_enum, default_value_t = AveragingArg::Macro)]
    averaging: AveragingArg,
    #[arg(long, value_enum, default_value_t = FailuresArg::Zero)]
    failures: FailuresArg,
    /// JSON report path; stdout when absent. The table goes to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Obj,
    Svg,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// A `.plank` or program JSON, a solution JSON (OBJ) or a drawing JSON (SVG).
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    /// Multiply OBJ coordinates by the program scale (millimetres).
    #[arg(long)]
    mm: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Dataset root written by `gen`, or a single split directory.
    dataset: PathBuf,
    /// Print JSON instead of text histograms.
    #[arg(long)]
    json: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Project(a) => commands::project(a),
        Command::Noise(a) => commands::noise(a),
        Command::Encode(a) => commands::encode(a),
        Command::Decode(a) => commands::decode(a),
        Command::Recon(a) => commands::recon(a),
        Command::Eval(a) => commands::eval(a),
        Command::Export(a) => commands::export(a),
        Command::Stats(a) => commands::stats(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
        // the panic message is already on stderr
        Err(_) => ExitCode::from(2),
    }
}
