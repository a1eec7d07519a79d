use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use mwrn::app::{self, Command};
use mwrn::config::load_config;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Rates,
    SerAnalytic,
    SerSim,
    Coeffs,
    Compare,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Rates => Command::Rates,
            Sub::SerAnalytic => Command::SerAnalytic,
            Sub::SerSim => Command::SerSim,
            Sub::Coeffs => Command::Coeffs,
            Sub::Compare => Command::Compare,
        }
    }
}

/// Rates and symbol error rates of pairwise multi-way relay networks.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Sub,
    /// Configuration file of `key = value` lines.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Also write one SVG plot per metric.
    #[arg(long)]
    svg: bool,
    /// Overrides in `key=value` form, applied after the file.
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut overrides = cli.overrides;
    if cli.svg {
        overrides.push("svg=true".into());
    }
    let result = load_config(cli.config.as_deref(), &overrides).and_then(|spec| app::run(cli.command.into(), &spec));
    match result {
        Ok(report) => {
            for note in &report.notes {
                println!("{note}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mwrn: {e}");
            ExitCode::FAILURE
        }
    }
}
