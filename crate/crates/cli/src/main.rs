//! `trustnet`: experiment driver for limited-trust games on social networks.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use trustnet_core::config::ExperimentConfig;
use trustnet_core::experiment::{
    preset, preset_names, rates_csv, rates_sweep, run_and_write, summarize, sweep_csv,
    sweep_delta, RatesConfig,
};

#[derive(Parser)]
#[command(name = "trustnet", version, about = "Limited-trust network game experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Path to a key=value config file.
        config: PathBuf,
        /// Output directory (overrides the config's `out` key).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named built-in experiment preset.
    Preset {
        /// Preset name; see `--list`.
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List available presets.
    Presets,
    /// Sweep one agent's trust level over the grid with rivals fixed.
    SweepDelta {
        config: PathBuf,
        /// Agent vertex label to sweep.
        #[arg(long)]
        agent: u64,
        /// Output directory; prints CSV to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the bound-discovery rate sweep.
    Rates {
        config: PathBuf,
        /// Output directory; prints CSV to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute summary metrics from a bundle directory.
    Summarize { dir: PathBuf },
}

fn worker_count() -> Result<usize> {
    match std::env::var("TRUSTNET_WORKERS") {
        Ok(v) => {
            let n: usize = v
                .parse()
                .with_context(|| format!("TRUSTNET_WORKERS must be a positive integer, got {v}"))?;
            if n == 0 {
                bail!("TRUSTNET_WORKERS must be at least 1");
            }
            Ok(n)
        }
        Err(_) => Ok(1),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    // results are worker-count independent by construction; validate anyway
    let _workers = worker_count()?;
    match Cli::parse().command {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::parse(&text)?;
            let out = match out.or_else(|| cfg.out.clone()) {
                Some(dir) => dir,
                None => bail!("no output directory: pass --out or set `out` in the config"),
            };
            let bundle = run_and_write(&cfg, &out)?;
            println!(
                "avg_utility = {}\nfinal_mean_delta = {}",
                bundle.summary.avg_utility, bundle.summary.final_mean_delta
            );
        }
        Command::Preset { name, seed, out } => {
            let cfg = preset(&name, seed)?;
            let bundle = run_and_write(&cfg, &out)?;
            println!(
                "avg_utility = {}\nfinal_mean_delta = {}",
                bundle.summary.avg_utility, bundle.summary.final_mean_delta
            );
        }
        Command::Presets => {
            for name in preset_names() {
                println!("{name}");
            }
        }
        Command::SweepDelta { config, agent, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::parse(&text)?;
            let csv = sweep_csv(&sweep_delta(&cfg, agent)?);
            emit(csv, out, "sweep.csv")?;
        }
        Command::Rates { config, out } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = RatesConfig::parse(&text)?;
            let csv = rates_csv(&rates_sweep(&cfg)?);
            emit(csv, out, "rates.csv")?;
        }
        Command::Summarize { dir } => {
            let s = summarize(&dir)?;
            println!("metric,value");
            println!("agents,{}", s.agents);
            println!("rounds,{}", s.rounds);
            println!("warmup,{}", s.warmup);
            println!("avg_utility,{}", s.avg_utility);
            println!("final_mean_delta,{}", s.final_mean_delta);
        }
    }
    Ok(())
}

fn emit(csv: String, out: Option<PathBuf>, name: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join(name), csv)?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}
