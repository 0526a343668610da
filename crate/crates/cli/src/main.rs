use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bnls_cli::commands::{cmd_evolve, cmd_ground_state, cmd_sweep, cmd_thresholds};
use bnls_cli::{CliError, Config};

#[derive(Parser)]
#[command(name = "bnls", version, about = "Radial biharmonic NLS and Choquard solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config, or a manifest.json from an earlier run.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; must not exist yet.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Derived exponents, theorem window and hypothesis violations.
    Thresholds(Common),
    /// Solve for Q, certify it and write the profile.
    GroundState(Common),
    /// Time evolution with diagnostics.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Seed for random initial data.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Amplitude × exponent grid of evolutions.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn out_dir(common: &Common, cfg: &Config) -> Result<PathBuf, CliError> {
    common
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .ok_or_else(|| CliError::Config("no output directory: pass --out or set output.dir".into()))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Thresholds(c) => {
            let cfg = Config::load(&c.config)?;
            let out = c.out.clone().or_else(|| cfg.output.dir.clone());
            cmd_thresholds(&cfg, out.as_deref(), &mut stdout)
        }
        Command::GroundState(c) => {
            let cfg = Config::load(&c.config)?;
            cmd_ground_state(&cfg, &out_dir(&c, &cfg)?, &mut stdout)
        }
        Command::Evolve { common, seed } => {
            let cfg = Config::load(&common.config)?;
            cmd_evolve(&cfg, &out_dir(&common, &cfg)?, seed, &mut stdout)
        }
        Command::Sweep { common, seed } => {
            let cfg = Config::load(&common.config)?;
            cmd_sweep(&cfg, &out_dir(&common, &cfg)?, seed, &mut stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bnls: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
