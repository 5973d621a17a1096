//! Command-line front end: closed-form report, noiseless verification of the
//! pulse scripts and swap circuit, Monte Carlo runs and figure data.

pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Level, RunConfig};
pub use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "rydrep", version, about = "Rydberg-blockade quantum repeater simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form link budget, swap success, round count and timing.
    Analytics {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Noiseless replay of the generation script, the diagnosis truth table
    /// and the exhaustive swap check.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Flip the |11> entry of P_LR (mutation check).
        #[arg(long, hide = true)]
        flip_plr_sign: bool,
    },
    /// Monte Carlo run at link or chain level.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// chain | link
        #[arg(long)]
        level: Option<String>,
        /// Worker threads (results do not depend on it).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// CSV data for the time-versus-distance plot and the round-count plots.
    Figures {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Flat TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// fast | faithful
    #[arg(long)]
    pub mode: Option<String>,
    /// Output file (analytics, simulate) or directory (figures).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub n_nodes: Option<usize>,
    #[arg(long)]
    pub l0_km: Option<f64>,
    #[arg(long)]
    pub l_att_km: Option<f64>,
    #[arg(long)]
    pub gamma_hz: Option<f64>,
    #[arg(long)]
    pub omega_rad_s: Option<f64>,
    #[arg(long)]
    pub eta_ion: Option<f64>,
    #[arg(long)]
    pub chi_r_hz: Option<f64>,
    /// Per-link success probability for fast mode.
    #[arg(long)]
    pub p0: Option<f64>,
    /// symmetric | physical
    #[arg(long)]
    pub schedule: Option<String>,
}

impl CommonArgs {
    /// Config file (or defaults) with command-line overrides applied.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        c.results = None;
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field {
                    c.$field = v.clone();
                })*
            };
        }
        set!(seed, trials, mode, n_nodes, l0_km, l_att_km, gamma_hz, omega_rad_s, eta_ion, chi_r_hz, schedule);
        if self.p0.is_some() {
            c.p0 = self.p0;
        }
        Ok(c)
    }
}

pub fn run(cli: &Cli, w: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Analytics { common } => commands::analytics(&common.resolve()?, common.out.as_deref(), w),
        Command::Verify { common, flip_plr_sign } => {
            common.resolve()?.validate()?;
            commands::verify(*flip_plr_sign, w)
        }
        Command::Simulate { common, level, threads } => {
            let mut config = common.resolve()?;
            if let Some(l) = level {
                config.level = l.clone();
            }
            commands::simulate(&config, common.out.as_deref(), *threads, w)
        }
        Command::Figures { common } => {
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
            commands::figures(&common.resolve()?, &dir, w)
        }
    }
}
