//! `orgnet`: reproducible analysis pipelines for organizational email
//! logs. Exit codes: 0 success, 1 usage error, 2 data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod manifest;

use config::PipelineConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl From<orgnet::Error> for CliError {
    fn from(err: orgnet::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(message) | CliError::Data(message) => f.write_str(message),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "orgnet",
    version,
    about = "Analyze organizational email logs: graphs, communities, layouts, \
             traffic series, and the hierarchical broadcast model"
)]
struct Cli {
    /// JSON configuration file. Flags override config values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (default: config, then $ORGNET_OUT, then ./out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Master seed for all randomness (default: config, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, normalize, and clean an email log.
    Ingest(IoArgs),
    /// Aggregate the address graph into organizational units.
    Aggregate(AggregateArgs),
    /// Betweenness centrality and degree statistics.
    Stats(StatsArgs),
    /// Divisive community detection with modularity selection.
    Communities(CommunitiesArgs),
    /// Lay out a graph and render SVG/DOT/GraphML.
    Layout(LayoutArgs),
    /// Commercial vs non-commercial external traffic per organization type.
    Tally(AggregateArgs),
    /// Out-degree distribution of the email graph.
    DegreeDist(DegreeArgs),
    /// Fit the power-law tail of a degree distribution.
    Fit(FitArgs),
    /// Invert a fitted tail into organizational parameters.
    Infer(InferArgs),
    /// Generate a synthetic broadcast network and its email log.
    Simulate(SimulateArgs),
    /// Per-bin traffic series and the weekday profile.
    Temporal(TemporalArgs),
    /// Run the full chain: ingest, aggregate, stats, layout, degree-dist,
    /// fit, infer, temporal.
    Pipeline,
}

#[derive(Args, Clone, Default)]
struct IoArgs {
    /// Email log path.
    #[arg(long, value_name = "PATH")]
    log: Option<PathBuf>,
    /// Log encoding: csv or jsonl.
    #[arg(long, value_name = "FORMAT")]
    format: Option<String>,
    /// Internal domain suffix for restriction (e.g. lab.gov).
    #[arg(long, value_name = "SUFFIX")]
    internal_suffix: Option<String>,
}

#[derive(Args, Clone, Default)]
struct AggregateArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Org chart CSV.
    #[arg(long, value_name = "PATH")]
    chart: Option<PathBuf>,
    /// Address directory CSV.
    #[arg(long, value_name = "PATH")]
    directory: Option<PathBuf>,
    /// Lift units to this hierarchy level.
    #[arg(long)]
    level: Option<u32>,
    /// Collapse units into the seven category super-nodes.
    #[arg(long)]
    by_category: bool,
}

#[derive(Args, Clone, Default)]
struct StatsArgs {
    #[command(flatten)]
    aggregate: AggregateArgs,
    /// Betweenness on the directed graph instead of the undirected
    /// projection.
    #[arg(long)]
    directed: bool,
    /// Use inverse-weight edge lengths instead of hop counts.
    #[arg(long)]
    inverse_weight: bool,
}

#[derive(Args, Clone, Default)]
struct CommunitiesArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Stop once this many components exist (default 2).
    #[arg(long, value_name = "N", conflicts_with = "exhaust")]
    components: Option<usize>,
    /// Remove every edge, recording all splits.
    #[arg(long)]
    exhaust: bool,
}

#[derive(Args, Clone, Default)]
struct LayoutArgs {
    #[command(flatten)]
    aggregate: AggregateArgs,
    /// Layout algorithm: force or circular.
    #[arg(long, value_name = "ALGO")]
    algo: Option<String>,
}

#[derive(Args, Clone, Default)]
struct DegreeArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Degree mode: distinct-recipients or total-messages.
    #[arg(long, value_name = "MODE")]
    mode: Option<String>,
}

#[derive(Args, Clone, Default)]
struct FitArgs {
    /// Degree distribution CSV (default: <out>/degree.csv).
    #[arg(long, value_name = "PATH")]
    degree: Option<PathBuf>,
    /// Fit cutoff: points with w >= cutoff qualify.
    #[arg(long)]
    cutoff: Option<u64>,
    /// Merge points into geometric bins of this ratio before fitting.
    #[arg(long, value_name = "RATIO")]
    log_binning: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct InferArgs {
    /// Fit report JSON (default: <out>/fit.json).
    #[arg(long, value_name = "PATH")]
    fit: Option<PathBuf>,
    /// Fitted slope magnitude, bypassing --fit.
    #[arg(long, requires = "intercept", conflicts_with = "fit")]
    beta: Option<f64>,
    /// Fitted intercept, bypassing --fit.
    #[arg(long, requires = "beta")]
    intercept: Option<f64>,
    /// Assumed span of control l.
    #[arg(long)]
    l: Option<f64>,
    /// Network node count N.
    #[arg(long = "N", value_name = "N")]
    n_input: Option<f64>,
}

#[derive(Args, Clone)]
struct SimulateArgs {
    /// Total employees N (must be a multiple of l^x).
    #[arg(long = "N")]
    employees: u64,
    /// Span of control l.
    #[arg(long)]
    l: u64,
    /// Broadcasters per managerial slot a.
    #[arg(long)]
    a: u64,
    /// Hierarchy levels below the top x.
    #[arg(long)]
    x: u32,
    /// Broadcast coverage probability in (0, 1].
    #[arg(long, value_name = "P")]
    coverage_p: Option<f64>,
    /// Mean background out-degree per employee.
    #[arg(long = "lambda", value_name = "RATE")]
    background: Option<f64>,
}

#[derive(Args, Clone, Default)]
struct TemporalArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Bin width in seconds (default 60).
    #[arg(long, value_name = "SECONDS")]
    bin_width: Option<i64>,
    /// Local-time offset east of UTC, in seconds.
    #[arg(long, value_name = "SECONDS")]
    tz_offset: Option<i32>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    let out_dir = config.resolve_out_dir(cli.out.as_deref());
    let seed = config.resolve_seed(cli.seed);
    let ctx = commands::Ctx {
        config,
        out_dir,
        seed,
    };
    match cli.command {
        Command::Ingest(args) => commands::ingest(&ctx, &args),
        Command::Aggregate(args) => commands::aggregate(&ctx, &args),
        Command::Stats(args) => commands::stats(&ctx, &args),
        Command::Communities(args) => commands::communities(&ctx, &args),
        Command::Layout(args) => commands::layout(&ctx, &args),
        Command::Tally(args) => commands::tally(&ctx, &args),
        Command::DegreeDist(args) => commands::degree_dist(&ctx, &args),
        Command::Fit(args) => commands::fit(&ctx, &args),
        Command::Infer(args) => commands::infer(&ctx, &args),
        Command::Simulate(args) => commands::simulate(&ctx, &args),
        Command::Temporal(args) => commands::temporal(&ctx, &args),
        Command::Pipeline => commands::pipeline(&ctx),
    }
}
