use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hoegkit::commands::{self, Overrides};
use hoegkit::config::RunConfig;
use hoegkit::error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "hoegkit",
    about = "Object-centric event logs, graph encodings, and remaining-time models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input .jsonocel file (overrides config).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory (overrides config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Split/shuffle seed (overrides config).
    #[arg(long)]
    seed: Option<u64>,
    /// efg | hoeg | efg_ss (overrides config).
    #[arg(long)]
    encoder: Option<String>,
    /// cc | leading:TYPE (overrides config).
    #[arg(long)]
    extraction: Option<String>,
    /// Train,validation,test ratios, e.g. 0.56,0.14,0.30 (overrides config).
    #[arg(long)]
    splits: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a .jsonocel file and report invariant violations.
    Validate { path: PathBuf },
    /// Print dataset summary statistics.
    Stats {
        path: PathBuf,
        /// cc | leading:TYPE
        #[arg(long, default_value = "cc")]
        extraction: String,
    },
    /// Extract process executions to JSON.
    Extract {
        path: PathBuf,
        #[arg(long, default_value = "cc")]
        extraction: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode executions as graph files plus a manifest.
    Encode {
        #[command(flatten)]
        config: ConfigArgs,
        /// Encode the view up to (and including) this event id.
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Train a model and write checkpoint, report, and metrics.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Evaluate a checkpoint on all splits.
    Evaluate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Sweep hidden dimensions and learning rates.
    Grid {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated hidden dimensions.
        #[arg(long, default_value = "8,16,24,32,48,64,128,256")]
        hidden_dims: String,
        /// Comma-separated learning rates.
        #[arg(long, default_value = "0.01,0.001")]
        learning_rates: String,
    },
    /// Write the running-example fixture as .jsonocel.
    Fixture {
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_splits(text: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad split ratio \"{p}\": {e}")))
        })
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(CliError::Usage(
            "expected exactly three split ratios".into(),
        )),
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| CliError::Usage(format!("bad {what} \"{p}\"")))
        })
        .collect()
}

fn resolve_config(args: &ConfigArgs) -> Result<RunConfig> {
    let base =
        match &args.config {
            Some(path) => RunConfig::load(path)?,
            None => {
                let input = args.input.clone().ok_or_else(|| {
                    CliError::Usage("either --config or --input is required".into())
                })?;
                let out = args.out.clone().ok_or_else(|| {
                    CliError::Usage("either --config or --out is required".into())
                })?;
                RunConfig {
                    input,
                    out,
                    extraction: "cc".into(),
                    splits: [0.56, 0.14, 0.30],
                    seed: 0,
                    chronological_splits: false,
                    encoder: hoegkit::Encoder::Hoeg,
                    dataset: "dataset".into(),
                    features: Default::default(),
                    model: Default::default(),
                    subgraph_k: 4,
                }
            }
        };
    let overrides = Overrides {
        input: args.input.clone(),
        out: args.out.clone(),
        seed: args.seed,
        encoder: args.encoder.clone(),
        extraction: args.extraction.clone(),
        splits: args.splits.as_deref().map(parse_splits).transpose()?,
    };
    commands::apply_overrides(base, &overrides)
}

fn run() -> Result<i32> {
    if let Ok(threads) = std::env::var("HOEGKIT_THREADS") {
        let n: usize = threads
            .parse()
            .map_err(|_| CliError::Usage(format!("bad HOEGKIT_THREADS \"{threads}\"")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }

    let cli = Cli::parse();
    match cli.command {
        Command::Validate { path } => commands::cmd_validate(&path),
        Command::Stats { path, extraction } => commands::cmd_stats(&path, &extraction),
        Command::Extract {
            path,
            extraction,
            out,
        } => commands::cmd_extract(&path, &extraction, &out),
        Command::Encode { config, prefix } => {
            let run = resolve_config(&config)?;
            commands::cmd_encode(&run, prefix.as_deref())
        }
        Command::Train { config } => {
            let run = resolve_config(&config)?;
            commands::cmd_train(&run)
        }
        Command::Evaluate { config, checkpoint } => {
            let run = resolve_config(&config)?;
            commands::cmd_evaluate(&run, &checkpoint)
        }
        Command::Grid {
            config,
            hidden_dims,
            learning_rates,
        } => {
            let run = resolve_config(&config)?;
            let dims: Vec<usize> = parse_list(&hidden_dims, "hidden dimension")?;
            let rates: Vec<f64> = parse_list(&learning_rates, "learning rate")?;
            commands::cmd_grid(&run, &dims, &rates)
        }
        Command::Fixture { out } => commands::cmd_fixture(&out),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
