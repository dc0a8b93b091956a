//! `market-mill`: simulate conditional-dynamics price increments, measure
//! millness and asymmetry patterns, and resample external tick data.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical or
//! statistical failure.

use std::path::PathBuf;
use std::process::exit;

use clap::{Args, Parser, Subcommand, ValueEnum};
use market_mill::StrategyMix;

mod cfgfile;
mod cmd;
mod emit;
mod error;
mod ingest;
mod manifest;
mod store;

#[derive(Parser)]
#[command(name = "market-mill", version, about, propagate_version = true)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct GlobalOpts {
    /// Override the seed carried by the preset or config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Run configuration file (flat key = value lines).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate increment series and store them with a run manifest.
    Simulate(SimulateArgs),
    /// Millness of stored series at one or more aggregation steps.
    Millness(MillnessArgs),
    /// Push-response asymmetry grids of stored series.
    Pattern(PatternArgs),
    /// Simulate a strategy mix and classify its x0-axis asymmetry pattern.
    Portrait(PortraitArgs),
    /// Resample a timestamp,price tick file into increment series.
    Ingest(IngestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    /// Single-scale reference run: 2000 series of 195 000 one-minute steps.
    Elementary,
    /// Multi-scale cascade with activation decay 0.8, same batch shape.
    Composite,
    /// Activation zero: pure Laplace noise.
    Noise,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesFormat {
    /// Length-prefixed little-endian doubles (MMILL1 header).
    Binary,
    /// One increment per line with a dt header comment.
    Csv,
    /// Synthetic price path starting at $50, ready for `ingest`.
    CsvPrices,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StoreFormat {
    Binary,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X0,
    Y0,
    Diag,
    Antidiag,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PortraitPresetArg {
    /// Trend-dominant mix (0.3, 0.0, 0.7): correlated portrait.
    DisLike,
    /// Mill-dominant mix (0.8, 0.1, 0.1): four-blade portrait.
    HdiLike,
    /// Contrarian-dominant mix (0.3, 0.7, 0.0): anticorrelated portrait.
    DeLike,
}

impl PortraitPresetArg {
    pub fn mix(self) -> StrategyMix {
        match self {
            PortraitPresetArg::DisLike => StrategyMix::trend_heavy(),
            PortraitPresetArg::HdiLike => StrategyMix::mill_heavy(),
            PortraitPresetArg::DeLike => StrategyMix::contrarian_heavy(),
        }
    }
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Built-in run shape; exclusive with --config.
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    /// Shrink the run to 400 series of 40 000 increments.
    #[arg(long)]
    pub desk: bool,
    /// Per-series file format.
    #[arg(long, value_enum, default_value_t = SeriesFormat::Binary)]
    pub format: SeriesFormat,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct MillnessArgs {
    /// Series file, or a directory of stored series.
    pub input: PathBuf,
    /// Aggregation steps in minutes; each must be a multiple of the stored dt0.
    #[arg(long, value_delimiter = ',', default_value = "1,3,6")]
    pub dt: Vec<f64>,
    /// Series groups for the scatter estimate; defaults to the input
    /// manifest's grouping, then to one group.
    #[arg(long)]
    pub groups: Option<usize>,
    /// Half-side of the counting square in dollars.
    #[arg(long, default_value_t = 0.3)]
    pub delta_p_star: f64,
    /// Label for the table's source column.
    #[arg(long, default_value = "simulated")]
    pub source: String,
    /// Also write millness.csv and a manifest here.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PatternArgs {
    /// Series file, or a directory of stored series.
    pub input: PathBuf,
    /// Reflection defining the antisymmetric part.
    #[arg(long, value_enum, default_value_t = AxisArg::X0)]
    pub axis: AxisArg,
    /// Grid bin width in dollars.
    #[arg(long, default_value_t = 0.01)]
    pub bin: f64,
    /// Grid half-extent in dollars.
    #[arg(long, default_value_t = 0.3)]
    pub extent: f64,
    /// Also rasterize each grid to a PPM image.
    #[arg(long)]
    pub image: bool,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct PortraitArgs {
    /// Named strategy mix; exclusive with --weights.
    #[arg(long, value_enum)]
    pub preset: Option<PortraitPresetArg>,
    /// Strategy weights as mill,contrarian,trend summing to 1.
    #[arg(long, value_delimiter = ',', value_name = "M,C,T")]
    pub weights: Option<Vec<f64>>,
    /// Grid bin width in dollars.
    #[arg(long, default_value_t = 0.01)]
    pub bin: f64,
    /// Grid half-extent in dollars.
    #[arg(long, default_value_t = 0.3)]
    pub extent: f64,
    /// Also rasterize each grid to a PPM image.
    #[arg(long)]
    pub image: bool,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct IngestArgs {
    /// Tick file with a timestamp,price header.
    pub input: PathBuf,
    /// Resampling interval in minutes.
    #[arg(long, default_value_t = 1.0)]
    pub dt0_minutes: f64,
    /// Trading session as HH:MM-HH:MM wall clock, or 'all'.
    #[arg(long, default_value = "all")]
    pub session: String,
    /// Per-segment file format.
    #[arg(long, value_enum, default_value_t = StoreFormat::Binary)]
    pub format: StoreFormat,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the thread pool: {e}");
            exit(2);
        }
    }
    let result = match &cli.command {
        Command::Simulate(args) => cmd::cmd_simulate(&cli.global, args),
        Command::Millness(args) => cmd::cmd_millness(args),
        Command::Pattern(args) => cmd::cmd_pattern(args),
        Command::Portrait(args) => cmd::cmd_portrait(&cli.global, args),
        Command::Ingest(args) => cmd::cmd_ingest(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        exit(e.exit_code());
    }
}
