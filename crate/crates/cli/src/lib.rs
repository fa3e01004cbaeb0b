//! Command-line runner for `sigplex`: simulate chain datasets, infer
//! complexes from CSV data, score predictions and rebuild the results table.

pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_evaluate, cmd_generate, cmd_infer, cmd_reproduce};
pub use config::{RunConfig, SubsetLen};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "sigplex", version, about = "Signature-based simplicial complex inference")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the coupled chain and write dataset.csv, truth.json, config.txt
    Generate {
        #[command(flatten)]
        settings: Settings,
    },
    /// Estimate hyperedge frequencies for a CSV dataset and threshold them
    Infer {
        /// Long-format CSV (`t,entity,channel,value`)
        data: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// Score a predicted edge document against a ground-truth document
    Evaluate {
        /// Document with `n` and `edges`, e.g. complex.json
        pred: PathBuf,
        /// Ground truth document, e.g. truth.json
        truth: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// Mean metrics over seeded runs for n = 5..8, next to the reference values
    Reproduce {
        #[command(flatten)]
        settings: Settings,
    },
}

/// Settings shared by every command. Values are applied on top of the
/// `--config` file.
#[derive(Debug, Default, Args)]
pub struct Settings {
    /// `key = value` file applied before the flags
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Number of vertices
    #[arg(long)]
    pub n: Option<String>,
    /// Coupling constant (non-zero)
    #[arg(long)]
    pub c: Option<String>,
    /// Noise standard deviation
    #[arg(long)]
    pub sigma: Option<String>,
    /// Standard deviation of the first vertex's initial value
    #[arg(long)]
    pub sigma_start: Option<String>,
    /// Delay (multiple of dt)
    #[arg(long)]
    pub h: Option<String>,
    /// Integration step
    #[arg(long)]
    pub dt: Option<String>,
    /// Length of the simulated interval
    #[arg(long)]
    pub horizon: Option<String>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<String>,
    /// Signature truncation order
    #[arg(long)]
    pub order: Option<String>,
    /// Penalty as a fraction of the smallest all-zero penalty
    #[arg(long)]
    pub lambda_ratio: Option<String>,
    /// Links are kept only when R² exceeds this
    #[arg(long)]
    pub r2_threshold: Option<String>,
    /// Largest simplex size
    #[arg(long)]
    pub k_max: Option<String>,
    /// Randomized time-subset tries
    #[arg(long)]
    pub n_tries: Option<String>,
    /// Times per try: a count, or a fraction of the grid such as 0.6
    #[arg(long)]
    pub subset_len: Option<String>,
    /// Frequency threshold
    #[arg(long)]
    pub tau: Option<String>,
    /// Runs per column in reproduce
    #[arg(long)]
    pub runs: Option<String>,
    /// Channel-count reconciliation for mixed-dimension data
    #[arg(long, value_parser = ["strict", "project", "zero-pad", "time"])]
    pub coherence: Option<String>,
    /// Worker threads (results do not depend on it)
    #[arg(long)]
    pub threads: Option<String>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<String>,
}

impl Settings {
    fn flags(&self) -> Vec<(&'static str, &str)> {
        let all = [
            ("n", &self.n),
            ("c", &self.c),
            ("sigma", &self.sigma),
            ("sigma-start", &self.sigma_start),
            ("h", &self.h),
            ("dt", &self.dt),
            ("horizon", &self.horizon),
            ("seed", &self.seed),
            ("order", &self.order),
            ("lambda-ratio", &self.lambda_ratio),
            ("r2-threshold", &self.r2_threshold),
            ("k-max", &self.k_max),
            ("n-tries", &self.n_tries),
            ("subset-len", &self.subset_len),
            ("tau", &self.tau),
            ("runs", &self.runs),
            ("coherence", &self.coherence),
            ("threads", &self.threads),
            ("out", &self.out),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect()
    }

    pub fn resolve(&self) -> CliResult<RunConfig> {
        RunConfig::resolve(self.config.as_deref(), self.flags())
    }
}

impl Command {
    fn settings(&self) -> &Settings {
        match self {
            Self::Generate { settings } | Self::Reproduce { settings } => settings,
            Self::Infer { settings, .. } | Self::Evaluate { settings, .. } => settings,
        }
    }
}

/// Resolve the configuration and run the command inside a worker pool of
/// the requested size. Returns the text to print.
pub fn execute(command: &Command) -> CliResult<String> {
    let cfg = command.settings().resolve()?;
    let run = || match command {
        Command::Generate { .. } => cmd_generate(&cfg),
        Command::Infer { data, .. } => cmd_infer(&cfg, data),
        Command::Evaluate { pred, truth, .. } => cmd_evaluate(&cfg, pred, truth),
        Command::Reproduce { .. } => cmd_reproduce(&cfg),
    };
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Setting { key: "threads".into(), message: e.to_string() })?
            .install(run),
        None => run(),
    }
}

/// Parse `args` (program name first), run, print, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
