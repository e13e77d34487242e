//! `hypwalk`: random walks, entropy, drift and boundary statistics on
//! hyperbolic reflection groups.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration or realization
//! error, 3 resource cap exceeded, 4 audit failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use hypwalk_core::boundary::BoundaryError;
use hypwalk_core::dehnfill::DehnFillError;
use hypwalk_core::estimators::EstimatorError;
use hypwalk_core::groups::GroupError;
use hypwalk_core::measures::MeasureError;

use config::{RawConfig, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("realization error: {0}")]
    Realization(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("audit failure: {0}")]
    Audit(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) | CliError::Realization(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Audit(_) => 4,
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::CapExceeded { .. } => CliError::Cap(e.to_string()),
            GroupError::Collision { .. } => CliError::Audit(e.to_string()),
            GroupError::Parse(_) | GroupError::BadWord(_) => CliError::Config(e.to_string()),
            _ => CliError::Realization(e.to_string()),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Group(g) => g.into(),
            MeasureError::SupportOverflow { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        if e.is_cap_breach() {
            CliError::Cap(e.to_string())
        } else if e.is_audit_failure() {
            CliError::Audit(e.to_string())
        } else {
            match e {
                EstimatorError::Group(g) => g.into(),
                EstimatorError::Measure(m) => m.into(),
                _ => CliError::Config(e.to_string()),
            }
        }
    }
}

impl From<BoundaryError> for CliError {
    fn from(e: BoundaryError) -> Self {
        match e {
            BoundaryError::Estimator(x) => x.into(),
            BoundaryError::Geom(_) => CliError::Realization(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<DehnFillError> for CliError {
    fn from(e: DehnFillError) -> Self {
        match e {
            DehnFillError::Group(g) => g.into(),
            DehnFillError::Measure(m) => m.into(),
            DehnFillError::Estimator(x) => x.into(),
            DehnFillError::NegativeSlack { .. } => CliError::Audit(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "hypwalk", version, about = "Random walks on hyperbolic reflection groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Config file (`key = value` lines and blocks).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// e.g. "triangle 2,3,7", "free", "dihedral 5", "diagram".
    #[arg(long, global = true)]
    group: Option<String>,
    /// "dihedral N", or "block" for the [family] section.
    #[arg(long, global = true)]
    family: Option<String>,
    /// "uniform-on-generators", "weights ...", or "block".
    #[arg(long, global = true)]
    measure: Option<String>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    k_max: Option<usize>,
    #[arg(long, global = true)]
    r_max: Option<usize>,
    /// Any config key, as `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Monte Carlo drift with a mean-displacement trace.
    Walk,
    /// Entropy upper sequence from exact convolution powers.
    Entropy,
    /// Entropy, drift and exponent over a family of groups.
    Sweep,
    /// Empirical hitting measure on the boundary.
    Hitting,
    /// Word-ball growth and critical-exponent estimate.
    Ball,
    /// Relator residuals of the realized generators.
    Verify,
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut raw = match &common.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    let flags: [(&str, Option<String>); 8] = [
        ("seed", common.seed.map(|v| v.to_string())),
        ("group", common.group.clone()),
        ("family", common.family.clone()),
        ("measure", common.measure.clone()),
        ("steps", common.steps.map(|v| v.to_string())),
        ("trials", common.trials.map(|v| v.to_string())),
        ("k_max", common.k_max.map(|v| v.to_string())),
        ("r_max", common.r_max.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            raw.set(k, &v)?;
        }
    }
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got {kv:?}")))?;
        raw.set(k.trim(), v.trim())?;
    }
    RunConfig::resolve(&raw)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let cfg = load(&cli.common)?;
    if cfg.tolerance_overridden {
        eprintln!("warning: numerical tolerances overridden; results are outside the validated regime");
    }
    let out = &cli.common.out;
    match cli.command {
        Command::Walk => commands::cmd_walk(&cfg, out),
        Command::Entropy => commands::cmd_entropy(&cfg, out),
        Command::Sweep => commands::cmd_sweep(&cfg, out),
        Command::Hitting => commands::cmd_hitting(&cfg, out),
        Command::Ball => commands::cmd_ball(&cfg, out),
        Command::Verify => commands::cmd_verify(&cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hypwalk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
