//! `toa`: run time-of-arrival scenarios described by TOML configs.

mod config;
mod error;
mod output;
mod scenarios;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{demo_config, Config, ScenarioKind};
use error::CliError;

#[derive(Parser)]
#[command(name = "toa", version, about = "Quantum time-of-arrival distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSV.
    Run {
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for the parallel sweeps.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a config without computing anything beyond the packet and grid.
    Validate { config: PathBuf },
    /// Print a ready-to-run config for a scenario kind.
    Demo { kind: ScenarioKind },
}

fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    Config::parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn set_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Config("--threads: must be >= 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Compute(format!("thread pool: {e}")))?;
    Ok(())
}

fn run(config: &Path, out: &Path, threads: Option<usize>) -> Result<PathBuf, CliError> {
    set_threads(threads)?;
    let cfg = load(config)?;
    let prepared = scenarios::prepare(&cfg)?;
    let table = scenarios::run(&prepared)?;
    let csv = table.to_csv(&prepared.resolved_toml()?)?;
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", out.display())))?;
    let path = out.join(cfg.output_name());
    std::fs::write(&path, csv)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

fn validate(config: &Path) -> Result<String, CliError> {
    let cfg = load(config)?;
    let p = scenarios::prepare(&cfg)?;
    let g = p.amplitude.grid();
    Ok(format!(
        "ok: {} scenario, {} momentum nodes on [{}, {}]",
        cfg.kind.name(),
        g.len(),
        g.p_min(),
        g.p_max()
    ))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run {
            config,
            out,
            threads,
        } => run(&config, &out, threads).map(|p| format!("wrote {}", p.display())),
        Command::Validate { config } => validate(&config),
        Command::Demo { kind } => Ok(demo_config(kind).trim_end().to_string()),
    };
    match result {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("toa: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
