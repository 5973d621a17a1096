//! Chain-level simulation: two phases of synchronized repeat-until-success
//! link generation, entanglement swapping with Pauli-frame tracking, and
//! whole-protocol restarts until swapping succeeds.

mod pauli;
mod swap;

use rand::Rng;
use rayon::prelude::*;

pub use pauli::{correction_for, BellLabel, PauliWord};
pub use swap::{
    all_outcomes, mul4, swap_gate_matrix, swap_gate_matrix_with, swap_oracle, swap_oracle_with_gate,
    u_gate, unitarity_error, v_gate, Mat2, Mat4, SwapOracleResult, ORACLE_FIDELITY, P_LR_DIAGONAL,
};

use crate::analytics;
use crate::linkprotocol::{attempt_link, coded_success_probability};
use crate::params::ChainParams;
use crate::record::{fmt_float, CsvRecord};
use crate::rng::trial_rng;
use crate::{ChainError, ParamError};

/// How a link attempt is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimMode {
    /// One Bernoulli(P₀) draw per link per round.
    #[default]
    Fast,
    /// Full state-vector attempt per link per round.
    Faithful,
}

impl SimMode {
    pub fn name(&self) -> &'static str {
        match self {
            SimMode::Fast => "fast",
            SimMode::Faithful => "faithful",
        }
    }
}

impl std::str::FromStr for SimMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fast" => Ok(SimMode::Fast),
            "faithful" => Ok(SimMode::Faithful),
            other => Err(format!("unknown mode {other:?} (expected fast|faithful)")),
        }
    }
}

/// Per-link, per-round success probability used in fast mode.
pub fn fast_p0(params: &ChainParams) -> Result<f64, ParamError> {
    analytics::chain_p0(params)
}

fn check_runnable(params: &ChainParams, mode: SimMode) -> Result<(), ChainError> {
    params.validate()?;
    let p_link = match mode {
        SimMode::Fast => fast_p0(params)?,
        SimMode::Faithful => coded_success_probability(&params.noise)?,
    };
    if !(p_link > 0.0) {
        return Err(ParamError::invalid("p0", p_link, "link success probability is zero").into());
    }
    if params.n_nodes > 2 {
        let node = analytics::swap_node_success(&params.noise)?;
        if !(node > 0.0) {
            return Err(ParamError::invalid("p1", node, "swap success probability is zero").into());
        }
    }
    Ok(())
}

/// Rounds and time spent on one phase.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseResult {
    pub rounds: u64,
    /// Seconds.
    pub elapsed: f64,
}

/// Runs `links` links in synchronized rounds until every one has succeeded.
/// A round lasts L₀/c in fast mode and the longest attempt in faithful mode.
pub fn run_phase<R: Rng + ?Sized>(
    links: usize,
    params: &ChainParams,
    mode: SimMode,
    rng: &mut R,
) -> Result<PhaseResult, ChainError> {
    let p0 = match mode {
        SimMode::Fast => fast_p0(params)?,
        SimMode::Faithful => 0.0,
    };
    let mut pending = links;
    let mut out = PhaseResult::default();
    while pending > 0 {
        out.rounds += 1;
        let mut round_time = params.noise.segment_time();
        let mut succeeded = 0;
        for _ in 0..pending {
            let ok = match mode {
                SimMode::Fast => rng.random::<f64>() < p0,
                SimMode::Faithful => {
                    let outcome = attempt_link(&params.noise, rng)?;
                    round_time = round_time.max(outcome.elapsed);
                    outcome.success
                }
            };
            succeeded += usize::from(ok);
        }
        pending -= succeeded;
        out.elapsed += round_time;
    }
    Ok(out)
}

/// Both generation phases.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GenerationRounds {
    pub phase1: PhaseResult,
    pub phase2: PhaseResult,
}

pub fn run_generation_phases<R: Rng + ?Sized>(
    params: &ChainParams,
    mode: SimMode,
    rng: &mut R,
) -> Result<GenerationRounds, ChainError> {
    let (k1, k2) = params.phase_link_counts();
    Ok(GenerationRounds {
        phase1: run_phase(k1, params, mode, rng)?,
        phase2: run_phase(k2, params, mode, rng)?,
    })
}

/// Measurement record of one intermediate node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapOutcome {
    pub i_l: u8,
    pub i_r: u8,
    pub correction: PauliWord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapResult {
    pub swap_ok: bool,
    /// Outcomes of the nodes that succeeded, in node order.
    pub outcomes: Vec<SwapOutcome>,
}

impl SwapResult {
    /// W = ∏ W_k.
    pub fn correction(&self) -> PauliWord {
        self.outcomes
            .iter()
            .fold(PauliWord::I, |w, o| w.compose(o.correction))
    }
}

/// Swapping at the N − 2 intermediate nodes. Each node succeeds with
/// probability (1 − 4πΓ/Ω)·η_ion⁴; measured bits are uniform.
pub fn run_swapping<R: Rng + ?Sized>(params: &ChainParams, rng: &mut R) -> Result<SwapResult, ChainError> {
    let node_success = analytics::swap_node_success(&params.noise)?;
    let mut result = SwapResult {
        swap_ok: true,
        outcomes: Vec::with_capacity(params.n_nodes.saturating_sub(2)),
    };
    for _ in 2..params.n_nodes {
        if rng.random::<f64>() < node_success {
            let i_l = u8::from(rng.random::<bool>());
            let i_r = u8::from(rng.random::<bool>());
            result.outcomes.push(SwapOutcome {
                i_l,
                i_r,
                correction: correction_for(i_l, i_r),
            });
        } else {
            result.swap_ok = false;
        }
    }
    Ok(result)
}

/// One end-to-end run: generation and swapping repeated until swapping
/// succeeds. Round counts and time accumulate over repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub rounds_phase1: u64,
    pub rounds_phase2: u64,
    pub protocol_repeats: u64,
    /// Seconds.
    pub total_time: f64,
    pub swap_ok: bool,
    /// Bell state of (R₁, L_N) before the final correction.
    pub end_state: BellLabel,
}

impl TrialRecord {
    pub fn rounds(&self) -> u64 {
        self.rounds_phase1 + self.rounds_phase2
    }
}

impl CsvRecord for TrialRecord {
    fn csv_header() -> &'static str {
        "trial,rounds_phase1,rounds_phase2,protocol_repeats,total_time_s,end_state"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.trial,
            self.rounds_phase1,
            self.rounds_phase2,
            self.protocol_repeats,
            fmt_float(self.total_time),
            self.end_state
        )
    }
}

pub fn run_trial<R: Rng + ?Sized>(
    trial: u64,
    params: &ChainParams,
    mode: SimMode,
    rng: &mut R,
) -> Result<TrialRecord, ChainError> {
    let mut record = TrialRecord {
        trial,
        rounds_phase1: 0,
        rounds_phase2: 0,
        protocol_repeats: 0,
        total_time: 0.0,
        swap_ok: false,
        end_state: BellLabel::PhiPlus,
    };
    while !record.swap_ok {
        let gen = run_generation_phases(params, mode, rng)?;
        record.rounds_phase1 += gen.phase1.rounds;
        record.rounds_phase2 += gen.phase2.rounds;
        record.total_time += gen.phase1.elapsed + gen.phase2.elapsed;
        record.protocol_repeats += 1;
        let swap = run_swapping(params, rng)?;
        if swap.swap_ok {
            record.swap_ok = true;
            record.end_state = BellLabel::from_pauli(swap.correction());
        }
    }
    Ok(record)
}

/// Sample mean and unbiased variance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn of<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let n = v.len() as f64;
        if v.is_empty() {
            return Moments::default();
        }
        let mean = v.iter().sum::<f64>() / n;
        let variance = if v.len() > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Moments { mean, variance }
    }

    /// Standard error of the mean for `n` samples.
    pub fn std_error(&self, n: usize) -> f64 {
        (self.variance / n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndToEndSummary {
    pub trials: usize,
    pub total_time: Moments,
    pub rounds_phase1: Moments,
    pub rounds_phase2: Moments,
    /// Rounds of both phases over all repeats.
    pub rounds: Moments,
    pub protocol_repeats: Moments,
    /// Rounds of both phases of a single protocol repeat, averaged over all
    /// repeats; the quantity the closed-form n̄ describes.
    pub rounds_per_repeat: f64,
    /// Delta-method standard error of `rounds_per_repeat`.
    pub rounds_per_repeat_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndToEnd {
    pub records: Vec<TrialRecord>,
    pub summary: EndToEndSummary,
}

pub fn summarize(records: &[TrialRecord]) -> EndToEndSummary {
    let total_rounds: u64 = records.iter().map(TrialRecord::rounds).sum();
    let total_repeats: u64 = records.iter().map(|r| r.protocol_repeats).sum();
    let ratio = if total_repeats > 0 {
        total_rounds as f64 / total_repeats as f64
    } else {
        0.0
    };
    let n = records.len() as f64;
    let ratio_error = if records.len() > 1 {
        let mean_repeats = total_repeats as f64 / n;
        let ss: f64 = records
            .iter()
            .map(|r| (r.rounds() as f64 - ratio * r.protocol_repeats as f64).powi(2))
            .sum();
        (ss / (n * (n - 1.0))).sqrt() / mean_repeats
    } else {
        0.0
    };
    EndToEndSummary {
        trials: records.len(),
        total_time: Moments::of(records.iter().map(|r| r.total_time)),
        rounds_phase1: Moments::of(records.iter().map(|r| r.rounds_phase1 as f64)),
        rounds_phase2: Moments::of(records.iter().map(|r| r.rounds_phase2 as f64)),
        rounds: Moments::of(records.iter().map(|r| r.rounds() as f64)),
        protocol_repeats: Moments::of(records.iter().map(|r| r.protocol_repeats as f64)),
        rounds_per_repeat: ratio,
        rounds_per_repeat_error: ratio_error,
    }
}

/// Runs `trials` independent trials in parallel. Trial `j` uses the stream
/// [`trial_rng`]`(seed, j)`, and records come back in trial order, so the
/// output does not depend on the number of worker threads.
pub fn run_end_to_end(
    params: &ChainParams,
    mode: SimMode,
    trials: usize,
    seed: u64,
) -> Result<EndToEnd, ChainError> {
    if trials == 0 {
        return Err(ChainError::NoTrials);
    }
    check_runnable(params, mode)?;
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(t, params, mode, &mut trial_rng(seed, t)))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(&records);
    Ok(EndToEnd { records, summary })
}
