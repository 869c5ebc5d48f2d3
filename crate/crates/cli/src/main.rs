//! `oad-ia` command-line front end.
//!
//! Exit status: 0 on success, 2 for usage or input errors, 3 when an event
//! stream breaks ordering or causality.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use oad_ia::stream::DEFAULT_LATENCY;
use oad_ia::DEFAULT_DELTA_T;

#[derive(Debug, Parser)]
#[command(
    name = "oad-ia",
    version,
    about = "Instantaneous-accuracy evaluation for online action detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one detector: per-video IA series and the maIA summary.
    Evaluate(EvaluateArgs),
    /// Evaluate a live event stream, printing IA as slots complete.
    Stream(StreamArgs),
    /// Write the detections of a synthetic baseline.
    Baseline(BaselineArgs),
    /// Compare detectors on mAP, cAP, maIA and weighted maIA.
    Summarize(SummarizeArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Ground-truth file.
    #[arg(long, value_name = "PATH")]
    gt: PathBuf,
    /// Slot length in seconds.
    #[arg(long = "delta-t", value_name = "SECONDS", default_value_t = DEFAULT_DELTA_T)]
    delta_t: f64,
    /// Worker threads (0 = one per core).
    #[arg(long, value_name = "N", default_value_t = 0)]
    jobs: usize,
    /// Whether headline figures use the weighted IA. Both are always written.
    #[arg(long, value_name = "BOOL", default_value_t = true, action = clap::ArgAction::Set)]
    weighted: bool,
}

#[derive(Debug, Args)]
struct RandomArgs {
    /// Seed of the random baseline.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mean detections per minute of the random baseline.
    #[arg(long, value_name = "PER_MINUTE", default_value_t = 2.0)]
    rate: f64,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    /// Detections file.
    #[arg(
        long,
        value_name = "PATH",
        required_unless_present = "baseline",
        conflicts_with = "baseline"
    )]
    det: Option<PathBuf>,
    /// Evaluate a built-in baseline instead of a file.
    #[arg(long, value_enum)]
    baseline: Option<BaselineName>,
    #[command(flatten)]
    random: RandomArgs,
    /// Output directory for series/<video>.csv and summary.csv.
    /// Without it the summary is printed.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StreamArgs {
    #[command(flatten)]
    common: Common,
    /// Event file; standard input when absent.
    #[arg(long, value_name = "PATH")]
    events: Option<PathBuf>,
    /// Seconds a slot stays open to revisions before it is reported.
    #[arg(long, value_name = "SECONDS", default_value_t = DEFAULT_LATENCY)]
    latency: f64,
    /// Also write series/<video>.csv and summary.csv here at the end.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    baseline: BaselineName,
    #[command(flatten)]
    random: RandomArgs,
    /// Write an event stream (emit time = end) instead of a detections file.
    #[arg(long = "as-events")]
    as_events: bool,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    #[command(flatten)]
    common: Common,
    /// Detections file; repeatable. Rows keep the command-line order.
    #[arg(long, value_name = "PATH")]
    det: Vec<PathBuf>,
    /// Built-in baseline; repeatable.
    #[arg(long, value_enum)]
    baseline: Vec<BaselineName>,
    #[command(flatten)]
    random: RandomArgs,
    /// Directory for comparison.csv. The table is printed either way.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaselineName {
    #[value(name = "all-bg")]
    AllBg,
    Pm,
    Random,
}

/// A failure with its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<oad_ia::Error> for Failure {
    fn from(e: oad_ia::Error) -> Self {
        Self {
            code: if e.is_stream_protocol() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let sub: &ArgMatches = matches
        .subcommand()
        .map(|(_, m)| m)
        .expect("subcommand is required");
    match run(cli.command, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("oad-ia: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command, matches: &ArgMatches) -> Result<(), Failure> {
    let jobs = match &command {
        Command::Evaluate(a) => a.common.jobs,
        Command::Stream(a) => a.common.jobs,
        Command::Baseline(a) => a.common.jobs,
        Command::Summarize(a) => a.common.jobs,
    };
    with_jobs(jobs, || match command {
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Stream(a) => commands::stream(&a),
        Command::Baseline(a) => commands::baseline(&a),
        Command::Summarize(a) => {
            let order = commands::detector_order(&a, matches);
            commands::summarize(&a, &order)
        }
    })
}

#[cfg(feature = "parallel")]
fn with_jobs<T: Send>(
    jobs: usize,
    f: impl FnOnce() -> Result<T, Failure> + Send,
) -> Result<T, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::input(format!("cannot start {jobs} workers: {e}")))?;
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<T>(_jobs: usize, f: impl FnOnce() -> Result<T, Failure>) -> Result<T, Failure> {
    f()
}
