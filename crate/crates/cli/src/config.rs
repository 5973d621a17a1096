//! Flat TOML run configuration. Every key is optional; an empty file runs the
//! default scenario (N = 10, L₀ = 100 km, L_att = 22 km, Γ = 1 kHz,
//! Ω = 2π × 1 MHz, η_ion = 0.99, c = 2 × 10⁸ m/s, χ_r = 10 GHz).
//!
//! Summaries written by the tool are the resolved config followed by a
//! `[results]` table, so a summary can be passed back as `--config`.

use std::path::Path;

use rydrep::chainsim::SimMode;
use rydrep::{ChainParams, NoiseParams, Schedule};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_nodes: usize,
    pub l0_km: f64,
    pub l_att_km: f64,
    /// Signal speed in the fiber, m/s.
    pub c_m_s: f64,
    pub gamma_hz: f64,
    pub omega_rad_s: f64,
    pub eta_ion: f64,
    pub chi_r_hz: f64,
    pub omega_over_delta_dd: f64,
    pub double_excitation_loss: bool,
    pub pulse_duration_s: f64,
    /// Fast-mode per-link success probability; derived from the noise model
    /// when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    /// symmetric | physical
    pub schedule: String,
    /// fast | faithful
    pub mode: String,
    /// chain | link
    pub level: String,
    pub trials: usize,
    pub seed: u64,
    /// Results of a previous run; ignored on input.
    #[serde(skip_serializing)]
    pub results: Option<toml::Table>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let chain = ChainParams::default();
        let noise = chain.noise;
        RunConfig {
            n_nodes: chain.n_nodes,
            l0_km: noise.l0_km,
            l_att_km: noise.l_att_km,
            c_m_s: noise.c,
            gamma_hz: noise.gamma,
            omega_rad_s: noise.omega,
            eta_ion: noise.eta_ion,
            chi_r_hz: chain.chi_r,
            omega_over_delta_dd: noise.omega_over_delta_dd,
            double_excitation_loss: noise.double_excitation_loss,
            pulse_duration_s: noise.pulse_duration,
            p0: chain.p0_override,
            schedule: chain.schedule.name().to_string(),
            mode: SimMode::Fast.name().to_string(),
            level: Level::Chain.name().to_string(),
            trials: 10_000,
            seed: 42,
            results: None,
        }
    }
}

/// What `simulate` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Chain,
    Link,
}

impl Level {
    pub fn name(&self) -> &'static str {
        match self {
            Level::Chain => "chain",
            Level::Link => "link",
        }
    }
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chain" => Ok(Level::Chain),
            "link" => Ok(Level::Link),
            other => Err(format!("unknown level {other:?} (expected chain|link)")),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn noise(&self) -> NoiseParams {
        NoiseParams {
            gamma: self.gamma_hz,
            omega: self.omega_rad_s,
            eta_ion: self.eta_ion,
            l0_km: self.l0_km,
            l_att_km: self.l_att_km,
            c: self.c_m_s,
            omega_over_delta_dd: self.omega_over_delta_dd,
            double_excitation_loss: self.double_excitation_loss,
            pulse_duration: self.pulse_duration_s,
        }
    }

    pub fn schedule(&self) -> Result<Schedule, CliError> {
        self.schedule.parse().map_err(CliError::Validation)
    }

    pub fn mode(&self) -> Result<SimMode, CliError> {
        self.mode.parse().map_err(CliError::Validation)
    }

    pub fn level(&self) -> Result<Level, CliError> {
        self.level.parse().map_err(CliError::Validation)
    }

    /// Chain parameters after validation.
    pub fn chain_params(&self) -> Result<ChainParams, CliError> {
        let params = ChainParams {
            n_nodes: self.n_nodes,
            noise: self.noise(),
            chi_r: self.chi_r_hz,
            p0_override: self.p0,
            schedule: self.schedule()?,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks every field, including the ones only some commands use.
    pub fn validate(&self) -> Result<(), CliError> {
        self.chain_params()?;
        self.mode()?;
        self.level()?;
        if self.trials == 0 {
            return Err(CliError::Validation("trials must be at least 1".into()));
        }
        Ok(())
    }

    /// The resolved config as a TOML table.
    pub fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("config serializes to a table")
    }
}

/// Resolved config plus a `[results]` table, as TOML text.
pub fn summary_document(config: &RunConfig, results: toml::Table) -> String {
    let mut doc = config.to_table();
    doc.insert("results".into(), toml::Value::Table(results));
    toml::to_string(&doc).expect("summary serializes")
}
