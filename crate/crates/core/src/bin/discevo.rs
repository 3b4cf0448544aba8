use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};
use discrete_evolution::config::ExperimentConfig;
use discrete_evolution::experiments::{run, Subcommand};
use discrete_evolution::Error;

#[derive(Parser)]
#[command(name = "discevo", version, about = "Banded lattice evolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML config (JSON if the name ends in .json)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplies every numeric tolerance
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Propagate a delta initial state and write the trajectory
    Simulate,
    /// Closed-form model solutions and their residuals
    Models,
    /// Generalized eigenvectors and growth audits over the lambda grid
    Eigen,
    /// Polynomial families, coordinate reconstruction and the completeness probe
    Favard,
    /// Pairing experiments: entire, growth, indicator, decay, sharpness
    Probe {
        #[arg(long)]
        experiment: Option<String>,
    },
    /// Kernel decay thresholds and shell audits
    Stationary,
    /// Full acceptance suite
    Verify,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut cfg = match &cli.common.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("discevo: {e}");
                return ExitCode::from(1);
            }
        },
        None => ExperimentConfig::default(),
    };
    if cli.common.seed.is_some() {
        cfg.seed = cli.common.seed;
    }
    if cli.common.tolerance_scale.is_some() {
        cfg.tolerance_scale = cli.common.tolerance_scale;
    }
    let cmd = match cli.command {
        Command::Simulate => Subcommand::Simulate,
        Command::Models => Subcommand::Models,
        Command::Eigen => Subcommand::Eigen,
        Command::Favard => Subcommand::Favard,
        Command::Probe { experiment } => {
            if experiment.is_some() {
                cfg.experiment = experiment;
            }
            Subcommand::Probe
        }
        Command::Stationary => Subcommand::Stationary,
        Command::Verify => Subcommand::Verify,
    };
    match run(cmd, &cfg, &cli.common.out, cli.common.quiet) {
        Ok(outcome) => {
            if !cli.common.quiet {
                println!("{}: {}", cmd.name(), if outcome.passed { "pass" } else { "FAIL" });
                for p in &outcome.artifacts {
                    println!("  wrote {}", p.display());
                }
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("discevo: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("discevo: {e}");
            ExitCode::from(2)
        }
    }
}
