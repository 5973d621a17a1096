//! Physical and schedule parameters shared by the link protocol, the chain
//! simulator and the closed-form analytics.

use std::f64::consts::PI;

use crate::error::ParamError;

/// Noise and geometry parameters of a single repeater link.
///
/// Defaults are the reference scenario: 100 km segments, 22 km attenuation
/// length, Γ = 1 kHz, Ω = 2π × 1 MHz, 99% ion detection and 1 µs pulses.
///
/// The effective-Hamiltonian couplings (Δ±, g±, Ω±, the fiber coupling α and
/// the atom number N_a) only set the size of `omega`; they are not simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Rydberg spontaneous-emission rate Γ in s⁻¹.
    pub gamma: f64,
    /// Two-photon Rabi frequency Ω in rad/s.
    pub omega: f64,
    /// Ion detection efficiency.
    pub eta_ion: f64,
    /// Distance between neighbouring cavities in km.
    pub l0_km: f64,
    /// Fiber attenuation length in km. `f64::INFINITY` means a lossless fiber.
    pub l_att_km: f64,
    /// Signal speed in the fiber, m/s.
    pub c: f64,
    /// Ω/Δ_dd, ratio of the Rabi frequency to the dipole-dipole shift.
    pub omega_over_delta_dd: f64,
    /// When set, every Rydberg-touching pulse also loses its excitation with
    /// probability (Ω/Δ_dd)².
    pub double_excitation_loss: bool,
    /// Duration of one π pulse, seconds.
    pub pulse_duration: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            gamma: 1.0e3,
            omega: 2.0 * PI * 1.0e6,
            eta_ion: 0.99,
            l0_km: 100.0,
            l_att_km: 22.0,
            c: 2.0e8,
            omega_over_delta_dd: 0.1,
            double_excitation_loss: false,
            pulse_duration: 1.0e-6,
        }
    }
}

impl NoiseParams {
    /// Noise-free link: no decay, perfect detection, lossless fiber.
    pub fn perfect() -> Self {
        NoiseParams {
            gamma: 0.0,
            eta_ion: 1.0,
            l_att_km: f64::INFINITY,
            ..NoiseParams::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let nonneg = [
            ("gamma", self.gamma),
            ("eta_ion", self.eta_ion),
            ("l0_km", self.l0_km),
            ("omega_over_delta_dd", self.omega_over_delta_dd),
            ("pulse_duration", self.pulse_duration),
        ];
        for (name, value) in nonneg {
            if !(value >= 0.0) || value.is_infinite() {
                return Err(ParamError::invalid(name, value, "must be finite and nonnegative"));
            }
        }
        if !(self.omega > 0.0) || self.omega.is_infinite() {
            return Err(ParamError::invalid("omega", self.omega, "must be finite and positive"));
        }
        if !(self.c > 0.0) || self.c.is_infinite() {
            return Err(ParamError::invalid("c", self.c, "must be finite and positive"));
        }
        if !(self.l_att_km > 0.0) {
            return Err(ParamError::invalid("l_att_km", self.l_att_km, "must be positive"));
        }
        if self.eta_ion > 1.0 {
            return Err(ParamError::invalid("eta_ion", self.eta_ion, "must not exceed 1"));
        }
        if self.omega_over_delta_dd >= 1.0 {
            return Err(ParamError::invalid(
                "omega_over_delta_dd",
                self.omega_over_delta_dd,
                "must be below 1",
            ));
        }
        Ok(())
    }

    /// Decay probability of one Rydberg excitation over one π pulse, πΓ/Ω.
    pub fn decay_per_pulse(&self) -> f64 {
        PI * self.gamma / self.omega
    }

    /// Jump probability per Rydberg-touching pulse used by the trajectory
    /// simulation, including the optional double-excitation loss.
    pub fn loss_per_pulse(&self) -> f64 {
        let extra = if self.double_excitation_loss {
            self.omega_over_delta_dd * self.omega_over_delta_dd
        } else {
            0.0
        };
        (self.decay_per_pulse() + extra).min(1.0)
    }

    /// Fiber transmission probability exp(−L₀/L_att).
    pub fn transmission(&self) -> f64 {
        (-self.l0_km / self.l_att_km).exp()
    }

    /// One-way photon travel time over a segment, L₀/c in seconds.
    pub fn segment_time(&self) -> f64 {
        self.l0_km * 1.0e3 / self.c
    }
}

/// How the N − 1 links of the chain are split over the two generation phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// K = ⌊N/2⌋ links in each phase. This is the accounting behind the
    /// closed-form round count, which doubles the K-link expectation.
    #[default]
    Symmetric,
    /// ⌈(N−1)/2⌉ links in phase one and ⌊(N−1)/2⌋ in phase two, i.e. exactly
    /// the N − 1 physical links.
    Physical,
}

impl Schedule {
    pub fn name(&self) -> &'static str {
        match self {
            Schedule::Symmetric => "symmetric",
            Schedule::Physical => "physical",
        }
    }
}

impl std::str::FromStr for Schedule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetric" => Ok(Schedule::Symmetric),
            "physical" => Ok(Schedule::Physical),
            other => Err(format!("unknown schedule {other:?} (expected symmetric|physical)")),
        }
    }
}

/// Parameters of an N-node chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    /// Number of nodes N (≥ 2).
    pub n_nodes: usize,
    pub noise: NoiseParams,
    /// Repetition rate of a direct-transmission photon source, Hz.
    pub chi_r: f64,
    /// Per-link, per-round success probability used by fast mode instead of
    /// the value derived from `noise`.
    pub p0_override: Option<f64>,
    pub schedule: Schedule,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            n_nodes: 10,
            noise: NoiseParams::default(),
            chi_r: 1.0e10,
            p0_override: None,
            schedule: Schedule::Symmetric,
        }
    }
}

impl ChainParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.n_nodes < 2 {
            return Err(ParamError::invalid("n_nodes", self.n_nodes as f64, "must be at least 2"));
        }
        if !(self.chi_r > 0.0) || self.chi_r.is_infinite() {
            return Err(ParamError::invalid("chi_r", self.chi_r, "must be finite and positive"));
        }
        if let Some(p) = self.p0_override {
            if !(p > 0.0 && p <= 1.0) {
                return Err(ParamError::invalid("p0", p, "must lie in (0, 1]"));
            }
        }
        self.noise.validate()
    }

    /// Total chain length L = (N − 1)·L₀ in km.
    pub fn total_length_km(&self) -> f64 {
        (self.n_nodes - 1) as f64 * self.noise.l0_km
    }

    /// Number of links handled in (phase one, phase two).
    pub fn phase_link_counts(&self) -> (usize, usize) {
        let links = self.n_nodes - 1;
        match self.schedule {
            Schedule::Symmetric => {
                let k = (self.n_nodes / 2).max(1);
                (k, k)
            }
            Schedule::Physical => (links.div_ceil(2), links / 2),
        }
    }
}
