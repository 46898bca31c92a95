use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vortexlab_cli::studies;
use vortexlab_cli::{CliError, ExperimentConfig};

/// Unstable vortex spectra and self-similar perturbation dynamics.
#[derive(Parser)]
#[command(name = "vortexlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON). Defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run directory. Defaults to `$VORTEXLAB_OUT/<subcommand>` or `runs/<subcommand>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for independent jobs.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build or verify a class C profile.
    Profile {
        #[command(subcommand)]
        action: ProfileAction,
    },
    /// Scan the unstable modes over the configured mode numbers.
    Spectrum,
    /// Evolve the rescaled perturbation started from the unstable mode.
    Evolve,
    /// Run the two-branch experiment along the epsilon ladder.
    Nonuniq,
    /// Run the full acceptance suite and print the pass/fail table.
    Acceptance,
    /// Aggregate a finished run directory into report.json.
    Report {
        run: PathBuf,
    },
}

#[derive(Subcommand)]
enum ProfileAction {
    Build,
    Verify {
        #[arg(long)]
        profile: PathBuf,
    },
}

fn default_out(name: &str) -> PathBuf {
    let root = std::env::var_os("VORTEXLAB_OUT").map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(name)
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    if let Command::Report { run } = &cli.command {
        return vortexlab_cli::report::write_report(run);
    }
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let name = match &cli.command {
        Command::Profile { .. } => "profile",
        Command::Spectrum => "spectrum",
        Command::Evolve => "evolve",
        Command::Nonuniq => "nonuniq",
        Command::Acceptance => "acceptance",
        Command::Report { .. } => unreachable!(),
    };
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| default_out(name));
    let out: &Path = &out;
    match cli.command {
        Command::Profile { action: ProfileAction::Build } => studies::profile_build(&cfg, out),
        Command::Profile {
            action: ProfileAction::Verify { profile },
        } => studies::profile_verify(&cfg, &profile, out),
        Command::Spectrum => studies::spectrum(&cfg, cli.jobs, out),
        Command::Evolve => studies::evolve_study(&cfg, out),
        Command::Nonuniq => studies::nonuniq_study(&cfg, cli.jobs, out),
        Command::Acceptance => studies::acceptance_study(&cfg, cli.jobs, out, |o| println!("{}", o.line())),
        Command::Report { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("vortexlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
