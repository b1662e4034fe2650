use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qprobe_cli::commands::{cmd_certify, cmd_generate, cmd_oracle_check, cmd_readout, Outcome};
use qprobe_cli::config::{self, CertifyConfig, GenerateConfig, OracleConfig, ReadoutConfig};
use qprobe_cli::CliError;

/// Probe-qubit generation, read-out and certification of many-body Bell correlations.
#[derive(Parser)]
#[command(name = "qprobe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config for the chosen command; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact central-spin and one-axis-twisting Bell correlator sweep.
    Generate,
    /// Simulated probe read-out of p_n(theta) and its theta spectrum.
    Readout,
    /// Squeezing, Fisher information, QFI bound, Bell correlator and depth bound.
    Certify,
    /// Brute-force product-space checks of the collective-spin code paths.
    OracleCheck,
}

fn resolve(flag: &Option<PathBuf>, file: &Option<PathBuf>, base: &std::path::Path) -> PathBuf {
    match (flag, file) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => base.join(p),
        (None, None) => PathBuf::from("."),
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli.config.as_deref();
    match cli.command {
        Command::Generate => {
            let (cfg, base): (GenerateConfig, _) = config::load(path)?;
            let out = resolve(&cli.out, &cfg.out, &base);
            cmd_generate(&cfg, &out, cli.seed.or(cfg.seed).unwrap_or(0))
        }
        Command::Readout => {
            let (cfg, base): (ReadoutConfig, _) = config::load(path)?;
            let out = resolve(&cli.out, &cfg.out, &base);
            cmd_readout(&cfg, &base, &out, cli.seed.or(cfg.seed).unwrap_or(0))
        }
        Command::Certify => {
            let (cfg, base): (CertifyConfig, _) = config::load(path)?;
            let out = resolve(&cli.out, &cfg.out, &base);
            cmd_certify(&cfg, &base, &out, cli.seed.or(cfg.seed).unwrap_or(0))
        }
        Command::OracleCheck => {
            let (cfg, base): (OracleConfig, _) = config::load(path)?;
            let out = resolve(&cli.out, &cfg.out, &base);
            cmd_oracle_check(&cfg, &out, cli.seed.or(cfg.seed).unwrap_or(0))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for file in outcome.files {
                println!("{}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qprobe: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
