use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::Layers;

const PRECEDENCE: &str = "\
Configuration precedence (later wins):
  1. built-in defaults
  2. --config FILE (flat TOML, must contain `version = 1`)
  3. environment variables HDCSEARCH_<KEY>, e.g. HDCSEARCH_EPISODES=50
  4. command-line flags, including --set KEY=VALUE";

#[derive(Parser)]
#[command(name = "hdcsearch", version, about = "Hyperdimensional classifier training and architecture search", after_help = PRECEDENCE)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration file (flat TOML with a version key).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override any configuration key, e.g. --set lr=0.1 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Master seed every random stream is derived from.
    #[arg(long, global = true)]
    master_seed: Option<u64>,
    /// Worker threads for per-seed evaluation and encoding (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for logs, checkpoints and models.
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Write zero durations so repeated runs give byte-identical logs.
    #[arg(long, global = true)]
    mask_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the architecture search and write the episode log, best config and summary.
    Search {
        /// Episode budget.
        #[arg(long)]
        episodes: Option<usize>,
        /// Sample architectures uniformly instead of from the controller.
        #[arg(long)]
        random: bool,
        /// Continue from the controller checkpoint and episode log in the output directory.
        #[arg(long, conflicts_with = "random")]
        resume: bool,
    },
    /// Train one architecture, report its scores and save the model.
    Train {
        /// Architecture file (e.g. best_config.toml from a search); defaults otherwise.
        #[arg(long, value_name = "FILE")]
        arch: Option<PathBuf>,
        /// Model seed; defaults to `model_seed` in the architecture file, then the first search seed.
        #[arg(long)]
        model_seed: Option<u64>,
        /// Retraining epochs.
        #[arg(long)]
        final_epochs: Option<usize>,
        /// Split used to pick the best epoch: validation or paper_mode_test.
        #[arg(long)]
        selection: Option<String>,
        /// Model file; defaults to OUTPUT_DIR/model.hdcm.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Score a saved model on the configured dataset.
    Eval {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// train, valid or test.
        #[arg(long, default_value = "valid")]
        split: String,
    },
    /// Score a grid of dimensions and sparsities; writes CSV `dim,sparsity,score`.
    Sweep {
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Comma-separated sparsities.
        #[arg(long, value_delimiter = ',', required = true)]
        sparsities: Vec<f64>,
        /// Architecture supplying the other fields.
        #[arg(long, value_name = "FILE")]
        arch: Option<PathBuf>,
        /// Model seed (defaults to the first search seed).
        #[arg(long)]
        model_seed: Option<u64>,
        /// CSV output; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Summarize an episode log.
    InspectLog {
        log: PathBuf,
        /// Number of top episodes to list.
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    if let Command::InspectLog { log, top } = &cli.command {
        return commands::inspect_log(log, *top);
    }

    let mut layers = Layers::from_file(cli.common.config.as_deref())?;
    layers.env(std::env::vars());
    for o in &cli.common.overrides {
        layers.set(o)?;
    }
    if let Some(s) = cli.common.master_seed {
        layers.set_value("master_seed", s as i64);
    }
    if let Some(j) = cli.common.jobs {
        layers.set_value("jobs", j as i64);
    }
    if let Some(d) = &cli.common.output_dir {
        layers.set_value("output_dir", d.display().to_string());
    }
    if cli.common.mask_timing {
        layers.set_value("mask_timing", true);
    }
    if let Command::Search { episodes: Some(n), .. } = &cli.command {
        layers.set_value("episodes", *n as i64);
    }
    if let Command::Train { final_epochs, selection, .. } = &cli.command {
        if let Some(n) = final_epochs {
            layers.set_value("final_epochs", *n as i64);
        }
        if let Some(s) = selection {
            layers.set_value("selection", s.clone());
        }
    }
    let cfg = layers.resolve()?;
    if cfg.jobs > 0 {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
    }

    match cli.command {
        Command::Search { random, resume, .. } => commands::search(&cfg, random, resume),
        Command::Train { arch, model_seed, out, .. } => {
            commands::train(&cfg, arch.as_deref(), model_seed, out.as_deref())
        }
        Command::Eval { model, split } => commands::eval(&cfg, &model, &split),
        Command::Sweep { dims, sparsities, arch, model_seed, out } => {
            commands::sweep(&cfg, &dims, &sparsities, arch.as_deref(), model_seed, out.as_deref())
        }
        Command::InspectLog { .. } => unreachable!(),
    }
}
