use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::bail;
use clap::{Args, Parser, Subcommand};

use dofcsit_cli::{run, Command, CompareGrid, ConfigFile, RunManifest};
use dofcsit_core::{ReducePolicy, SimConfig, User};

#[derive(Parser)]
#[command(name = "dofcsit", version, about = "DoF region, scheme synthesis and link simulation for the two-user MISO BC")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// DoF region and weighted-sum decomposition of a profile.
    Region(Common),
    /// Subchannel decomposition, reduction and u0 pairing.
    Decompose(Common),
    /// Synthesize and check a transmission plan.
    Synth(Common),
    /// Monte-Carlo SNR sweep of the synthesized plan.
    Simulate(SimArgs),
    /// Suboptimal vs optimal sum DoF over an (alpha, beta) grid.
    Compare(CompareArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// User who owns the common messages.
    #[arg(long, value_parser = ["1", "2"])]
    owner: Option<String>,
    #[arg(long)]
    reduce_policy: Option<ReducePolicy>,
    /// TOML file with the same fields as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',')]
    snr_db: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fit_points: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid spacing when no explicit lists are given.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
}

fn load_config(path: &Option<PathBuf>) -> anyhow::Result<ConfigFile> {
    path.as_deref().map_or_else(|| Ok(ConfigFile::default()), ConfigFile::load)
}

fn base_manifest(command: Command, c: Common) -> anyhow::Result<(RunManifest, ConfigFile)> {
    let file = load_config(&c.config)?;
    let mut m = RunManifest::new(command);
    m.profile_path = c.profile.or_else(|| file.profile.clone());
    m.output_path = c.out.or_else(|| file.out.clone());
    let owner = match c.owner {
        Some(s) => s.parse::<u8>()?,
        None => file.owner.unwrap_or(1),
    };
    m.owner = match User::from_number(owner) {
        Some(u) => u,
        None => bail!("owner must be 1 or 2, got {owner}"),
    };
    m.reduce_policy = c.reduce_policy.or(file.reduce_policy).unwrap_or_default();
    Ok((m, file))
}

fn manifest(cli: Cli) -> anyhow::Result<(RunManifest, Option<usize>)> {
    Ok(match cli.command {
        Cmd::Region(c) => (base_manifest(Command::Region, c)?.0, None),
        Cmd::Decompose(c) => (base_manifest(Command::Decompose, c)?.0, None),
        Cmd::Synth(c) => (base_manifest(Command::Synth, c)?.0, None),
        Cmd::Simulate(s) => {
            let (mut m, file) = base_manifest(Command::Simulate, s.common)?;
            let d = SimConfig::default();
            m.sim = Some(SimConfig {
                snr_grid_db: s.snr_db.or(file.snr_db).unwrap_or(d.snr_grid_db),
                trials: s.trials.or(file.trials).unwrap_or(d.trials),
                seed: s.seed.or(file.seed).unwrap_or(d.seed),
                fit_points: s.fit_points.or(file.fit_points).unwrap_or(d.fit_points),
            });
            (m, s.threads.or(file.threads))
        }
        Cmd::Compare(c) => {
            let file = load_config(&c.config)?;
            let mut m = RunManifest::new(Command::Compare);
            m.output_path = c.out.or(file.out);
            let alpha = c.alpha.or(file.alpha);
            let beta = c.beta.or(file.beta);
            m.grid = match (alpha, beta) {
                (None, None) => c.step.or(file.step).map_or_else(CompareGrid::default, CompareGrid::Step),
                (Some(alpha), Some(beta)) => CompareGrid::Lists { alpha, beta },
                _ => bail!("--alpha and --beta must be given together"),
            };
            (m, None)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = manifest(cli).and_then(|(m, threads)| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
        let outcome = pool.install(|| run(&m))?;
        Ok((m, outcome))
    });
    match result {
        Ok((m, outcome)) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if m.output_path.is_some() {
                println!("{}", outcome.summary);
            } else {
                eprintln!("{}", outcome.summary);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
