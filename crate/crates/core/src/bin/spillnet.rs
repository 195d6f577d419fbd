use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spillnet::commands::{
    cmd_all, cmd_ingest, cmd_measures, cmd_plotdata, cmd_spillover, RunContext, SpilloverOverrides,
};
use spillnet::config::Config;
use spillnet::{Result, SystemMode};

/// Volatility connectedness and spillover asymmetry from tick data.
///
/// Log verbosity follows the SPILLNET_LOG environment variable
/// (error, warn, info, debug, trace). Exit codes: 0 success, 2 config
/// error, 3 data error, 4 numerical failure.
#[derive(Parser, Debug)]
#[command(name = "spillnet", version)]
struct Cli {
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory (overrides `output_dir` in the config).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Plain,
    Signed,
}

#[derive(Args, Debug, Default)]
struct SpilloverFlags {
    /// Plain (RV per asset) or signed (RS+ and RS- per asset) system.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Rolling window length in days.
    #[arg(long)]
    window: Option<usize>,
    /// Forecast horizon H.
    #[arg(long)]
    horizon: Option<usize>,
    /// VAR lag order.
    #[arg(long)]
    lags: Option<usize>,
    /// Bootstrap replicates per window (0 disables intervals).
    #[arg(long)]
    bootstrap: Option<usize>,
    /// Bootstrap block length in days.
    #[arg(long)]
    block_length: Option<usize>,
    /// Confidence level of the bootstrap intervals.
    #[arg(long)]
    ci_level: Option<f64>,
    /// Base seed for the bootstrap.
    #[arg(long)]
    seed: Option<u64>,
    /// measures.csv to read instead of the one in the output directory.
    #[arg(long)]
    measures: Option<PathBuf>,
    /// Extra window lengths to re-run, e.g. `--robustness 100,150`.
    #[arg(long, value_delimiter = ',')]
    robustness: Option<Vec<usize>>,
    /// Write aic.csv for the full sample with lags 1..=P.
    #[arg(long, value_name = "P")]
    aic_max: Option<usize>,
}

impl SpilloverFlags {
    fn overrides(&self, jobs: Option<usize>) -> SpilloverOverrides {
        SpilloverOverrides {
            mode: self.mode.map(|m| match m {
                Mode::Plain => SystemMode::Plain,
                Mode::Signed => SystemMode::Signed,
            }),
            window: self.window,
            horizon: self.horizon,
            lags: self.lags,
            bootstrap: self.bootstrap,
            block_length: self.block_length,
            ci_level: self.ci_level,
            seed: self.seed,
            jobs,
            measures: self.measures.clone(),
            robustness_windows: self.robustness.clone(),
            aic_max: self.aic_max,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split ticks into trading days and resample each day onto the grid.
    Ingest(Common),
    /// Daily realized variance and semivariances for the aligned panel.
    Measures(Common),
    /// Full-sample table and rolling spillover indices.
    Spillover {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpilloverFlags,
    },
    /// Plot-ready CSVs from rolling.csv.
    Plotdata(Common),
    /// Every stage in order.
    All {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: SpilloverFlags,
    },
}

fn context(common: &Common) -> Result<RunContext> {
    RunContext::new(Config::load(&common.config)?, common.out.as_deref())
}

fn run(cli: Cli) -> Result<String> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(spillnet::SpillError::Config(
                "--jobs must be at least 1".into(),
            ));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            log::warn!("cannot size the worker pool: {e}");
        }
    }
    Ok(match &cli.command {
        Command::Ingest(c) => cmd_ingest(&context(c)?)?.to_string(),
        Command::Measures(c) => cmd_measures(&context(c)?)?.to_string(),
        Command::Spillover { common, flags } => {
            cmd_spillover(&context(common)?, &flags.overrides(cli.jobs))?.to_string()
        }
        Command::Plotdata(c) => cmd_plotdata(&context(c)?)?.to_string(),
        Command::All { common, flags } => cmd_all(&context(common)?, &flags.overrides(cli.jobs))?,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPILLNET_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("spillnet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
