//! `bornlab`: runs one experiment described by a TOML file.

mod config;
mod experiments;
mod output;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use bornlab_core::LatticeSpec;
use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use config::ExperimentConfig;
use experiments::ConfigError;
use output::OutputDir;

#[derive(Parser)]
#[command(
    name = "bornlab",
    version,
    about = "Correlator surrogates and variance experiments for Born machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Also write SVG plots.
        #[arg(long)]
        svg: bool,
    },
    /// Parse and check a config without running it.
    Validate { config: PathBuf },
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: config::ExperimentKind,
    config_sha256: String,
    seed: u64,
    config: &'a ExperimentConfig,
    /// Pair and triplet lists of a 2D lattice model, which the Hamiltonian leaves implicit.
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice: Option<Lattice>,
    artifacts: Vec<String>,
}

#[derive(Serialize)]
struct Lattice {
    pairs: Vec<(usize, usize)>,
    triplets: Vec<(usize, usize, usize)>,
}

fn lattice(cfg: &ExperimentConfig) -> Result<Option<Lattice>> {
    let Some(config::DataConfig::Haldane2d { nx, ny, .. }) = cfg.data else {
        return Ok(None);
    };
    let adj = LatticeSpec::YPeriodic { nx, ny }.adjacency()?;
    Ok(Some(Lattice {
        pairs: adj.pairs,
        triplets: adj.triplets,
    }))
}

fn load(path: &Path) -> Result<(ExperimentConfig, Vec<u8>)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| ConfigError(format!("config is not UTF-8: {e}")))?;
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError(format!("invalid config: {e}")))?;
    experiments::validate(&cfg)?;
    Ok((cfg, bytes))
}

fn run(config: &Path, out: Option<PathBuf>, threads: Option<usize>, svg: bool) -> Result<()> {
    let (cfg, bytes) = load(config)?;
    if let Some(t) = threads {
        if t == 0 {
            return Err(ConfigError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let root = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| {
        PathBuf::from(format!(
            "runs/{}",
            config.file_stem().and_then(|s| s.to_str()).unwrap_or("run")
        ))
    });
    let mut dir = OutputDir::create(&root)?;
    experiments::run(&cfg, &mut dir, svg)?;
    let mut artifacts = dir.written().to_vec();
    artifacts.sort();
    let meta = Metadata {
        tool: "bornlab",
        version: env!("CARGO_PKG_VERSION"),
        experiment: cfg.experiment,
        config_sha256: Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect(),
        seed: cfg.seed,
        config: &cfg,
        lattice: lattice(&cfg)?,
        artifacts,
    };
    dir.write_json("metadata.json", &meta)?;
    println!("wrote {} artifacts to {}", dir.written().len(), root.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            threads,
            svg,
        } => run(&config, out, threads, svg),
        Command::Validate { config } => load(&config).map(|(cfg, _)| println!("ok: {:?}", cfg.experiment)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
