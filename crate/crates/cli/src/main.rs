//! `omrr`: noise budgets, bandwidth optimization, hybrid spectra and
//! shot-by-shot simulation for atom-interferometer / optomechanical hybrid
//! accelerometers.

mod commands;
mod config;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use config::{Config, TABLE_ENV};
use output::OutputDir;

#[derive(Parser)]
#[command(name = "omrr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory receiving tables, summary and manifest.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Also write plot.py for quick-look figures.
    #[arg(long, global = true)]
    emit_plot_script: bool,

    /// Peterson-format noise table replacing the built-in high-noise model.
    #[arg(long, global = true, value_name = "PATH", env = TABLE_ENV)]
    peterson_table: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Ambient and OMRR noise curves.
    Noise,
    /// Sweep the OMRR resonance for each displacement noise level.
    Optimize,
    /// Hybrid sensor spectra with reference levels.
    Spectra,
    /// Shot-by-shot simulation with OMRR correction.
    Simulate {
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Noise => "noise",
            Command::Optimize => "optimize",
            Command::Spectra => "spectra",
            Command::Simulate { .. } => "simulate",
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: Option<u64>,
    config: &'a Config,
    outputs: &'a [String],
    duration_s: f64,
}

enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

fn resolve_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(table) = &cli.peterson_table {
        cfg.ambient.table = Some(table.clone());
    }
    if let Command::Simulate { seed: Some(seed) } = cli.command {
        cfg.simulate.seed = seed;
    }
    // Fail on unreadable tables and invalid parameters before any output.
    cfg.hybrid()?;
    match cli.command {
        Command::Noise => drop(cfg.noise.grid("noise")?),
        Command::Optimize => drop(cfg.optimize.omega_grid()?),
        Command::Spectra => drop(cfg.spectra.grid()?),
        Command::Simulate { .. } => drop(cfg.simulation()?),
    }
    Ok(cfg)
}

fn execute(cli: &Cli, cfg: &Config, out: &mut OutputDir) -> Result<()> {
    let start = Instant::now();
    let summary: Value = match cli.command {
        Command::Noise => commands::noise(cfg, out)?,
        Command::Optimize => commands::optimize(cfg, out)?,
        Command::Spectra => commands::spectra(cfg, out)?,
        Command::Simulate { .. } => commands::simulate(cfg, out)?,
    };
    out.write_json("summary.json", &summary)?;
    out.write_bytes("config.resolved.toml", cfg.to_toml()?.as_bytes())?;
    if cli.emit_plot_script {
        let script = plot::script(out.files());
        out.write_bytes("plot.py", script.as_bytes())?;
    }
    let outputs = out.files().to_vec();
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        seed: matches!(cli.command, Command::Simulate { .. }).then_some(cfg.simulate.seed),
        config: cfg,
        outputs: &outputs,
        duration_s: start.elapsed().as_secs_f64(),
    };
    out.write_json("manifest.json", &manifest)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = resolve_config(cli).map_err(Failure::Usage)?;
    let mut out = OutputDir::create(&cli.out).map_err(Failure::Run)?;
    match execute(cli, &cfg, &mut out) {
        Ok(()) => Ok(()),
        Err(e) => {
            out.cleanup();
            Err(Failure::Run(e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
