//! One entanglement-generation round for a single link: the twelve-step
//! generation script, the fiber transfer, the auxiliary-subnode diagnosis
//! and the heralding verdict.
//!
//! Every pulse that touches a Rydberg level is followed (or preceded) by one
//! draw of the decay channel. The draw is placed on whichever side of the
//! pulse carries more Rydberg population, which charges one full decay
//! probability per pulse during which an excitation sits in a Rydberg level.
//! With that placement the generation script exposes 6.5 pulses on ensemble k
//! and 2.0 on ensemble k+1, and the diagnosis 8.0 per ensemble for a correct
//! input (see [`pulse_inventory`]).
//!
//! The occupancy check of the diagnosis misses two kinds of jump: a decay
//! inside the diagnosis after the auxiliary subnode has been flipped, and a
//! decay of the r₋ excitation of step iii after the − photon has left (the
//! blockade lifts and step v writes 1_R next to a − photon). Both end as
//! [`FailureCause::FalseAccept`].

use rand::Rng;
use rayon::prelude::*;

use crate::record::{fmt_float, CsvRecord};
use crate::rng::trial_rng;
use crate::statevec::{
    apply_decay_channel, apply_pulses, ionize_and_detect, new_link_state, overlap, transfer_photon,
    BasisLabel, CavityMode, EnsembleConfig, Level, LinkState, LossCause, PulseSpec, RydbergLevel,
    Side, Status, Subnode,
};
use crate::StateError;

pub use crate::params::NoiseParams;

/// Overlap with the target state above which an accepted link counts as
/// correctly entangled.
pub const HERALD_FIDELITY: f64 = 1.0 - 1e-9;

const R_MINUS: Level = Level::Rydberg(RydbergLevel::Minus);
const R_PLUS: Level = Level::Rydberg(RydbergLevel::Plus);
const R_AUX: Level = Level::Rydberg(RydbergLevel::Aux);
const ZERO_A: Level = Level::Zero(Subnode::A);
const ONE_A: Level = Level::One(Subnode::A);

/// One entry of the generation script.
#[derive(Debug, Clone, PartialEq)]
pub enum GenerationStep {
    /// Pulses driven at the same time (step i has two, all others one).
    Pulses(Vec<PulseSpec>),
    /// Photon transfer from cavity k to cavity k+1.
    Transfer,
}

/// Steps i to xii in order.
pub fn generation_script() -> Vec<GenerationStep> {
    use GenerationStep::Pulses;
    let half = std::f64::consts::PI / 2f64.sqrt();
    let k = Side::K;
    let k1 = Side::K1;
    vec![
        Pulses(vec![
            PulseSpec::pi(k, Level::Reservoir, R_MINUS).with_angle(half),
            PulseSpec::pi(k, Level::Reservoir, R_PLUS).with_angle(half),
        ]),
        Pulses(vec![PulseSpec::pi(k, R_MINUS, Level::Reservoir).with_cavity(CavityMode::Minus)]),
        Pulses(vec![PulseSpec::pi(k, Level::Reservoir, R_MINUS)]),
        Pulses(vec![PulseSpec::pi(k, R_PLUS, Level::Reservoir).with_cavity(CavityMode::Plus)]),
        Pulses(vec![PulseSpec::pi(k, Level::Reservoir, R_PLUS)]),
        Pulses(vec![PulseSpec::pi(k, R_MINUS, Level::Zero(Subnode::R))]),
        Pulses(vec![PulseSpec::pi(k, R_PLUS, Level::One(Subnode::R))]),
        GenerationStep::Transfer,
        Pulses(vec![PulseSpec::pi(k1, Level::Reservoir, R_MINUS).with_cavity(CavityMode::Minus)]),
        Pulses(vec![PulseSpec::pi(k1, R_MINUS, Level::Zero(Subnode::L))]),
        Pulses(vec![PulseSpec::pi(k1, Level::Reservoir, R_PLUS).with_cavity(CavityMode::Plus)]),
        Pulses(vec![PulseSpec::pi(k1, R_PLUS, Level::One(Subnode::L))]),
    ]
}

/// Subnode entangled by the link on each side: R on ensemble k, L on k+1.
pub fn link_subnode(side: Side) -> Subnode {
    match side {
        Side::K => Subnode::R,
        Side::K1 => Subnode::L,
    }
}

/// Auxiliary preparation (s → r_A → 0_A) followed by the eight diagnosis
/// pulses for the link subnode of `side`.
pub fn diagnosis_script(side: Side) -> Vec<PulseSpec> {
    let x = link_subnode(side);
    let (zero_x, one_x) = (Level::Zero(x), Level::One(x));
    let pi = |from, to| PulseSpec::pi(side, from, to);
    vec![
        pi(Level::Reservoir, R_AUX),
        pi(R_AUX, ZERO_A),
        pi(one_x, R_PLUS),
        pi(ZERO_A, R_AUX),
        pi(R_AUX, ONE_A),
        pi(R_PLUS, one_x),
        pi(zero_x, R_MINUS),
        pi(ZERO_A, R_AUX),
        pi(R_AUX, ONE_A),
        pi(R_MINUS, zero_x),
    ]
}

/// Number of pulse slots in one attempt (simultaneous pulses count separately).
pub fn pulses_per_attempt() -> usize {
    let generation: usize = generation_script()
        .iter()
        .map(|s| match s {
            GenerationStep::Pulses(p) => p.len(),
            GenerationStep::Transfer => 0,
        })
        .sum();
    generation + 2 * diagnosis_script(Side::K).len()
}

/// Wall-clock duration of one attempt: L₀/c plus the pulse time.
pub fn attempt_duration(noise: &NoiseParams) -> f64 {
    noise.segment_time() + pulses_per_attempt() as f64 * noise.pulse_duration
}

/// (|0̄_R⟩_k|0̄_L⟩_{k+1} + |1̄_R⟩_k|1̄_L⟩_{k+1})/√2 with both cavities empty.
pub fn generation_target() -> LinkState {
    let zero = BasisLabel::new(
        EnsembleConfig::reservoir().with(Level::Zero(Subnode::R)),
        Default::default(),
        EnsembleConfig::reservoir().with(Level::Zero(Subnode::L)),
        Default::default(),
    );
    let one = BasisLabel::new(
        EnsembleConfig::reservoir().with(Level::One(Subnode::R)),
        Default::default(),
        EnsembleConfig::reservoir().with(Level::One(Subnode::L)),
        Default::default(),
    );
    LinkState::superposition(&[zero, one])
}

/// The thirteen states of the noiseless generation sequence (initial state
/// followed by the state after each of steps i to xii), written out by hand.
pub fn expected_generation_states() -> Vec<LinkState> {
    let rows: [&[&str]; 13] = [
        &["s|vac|s|vac"],
        &["r-|vac|s|vac", "r+|vac|s|vac"],
        &["s|-|s|vac", "r+|vac|s|vac"],
        &["r-|-|s|vac", "r+|vac|s|vac"],
        &["r-|-|s|vac", "s|+|s|vac"],
        &["r-|-|s|vac", "r+|+|s|vac"],
        &["0R|-|s|vac", "r+|+|s|vac"],
        &["0R|-|s|vac", "1R|+|s|vac"],
        &["0R|vac|s|-", "1R|vac|s|+"],
        &["0R|vac|r-|vac", "1R|vac|s|+"],
        &["0R|vac|0L|vac", "1R|vac|s|+"],
        &["0R|vac|0L|vac", "1R|vac|r+|vac"],
        &["0R|vac|0L|vac", "1R|vac|1L|vac"],
    ];
    rows.iter()
        .map(|row| {
            let labels: Vec<BasisLabel> = row.iter().map(|s| s.parse().expect("valid label")).collect();
            LinkState::superposition(&labels)
        })
        .collect()
}

/// Applies simultaneous `pulses` with one decay draw if any of them touches a
/// Rydberg level. Returns the new state and the Rydberg exposure charged.
pub fn apply_with_decay<R: Rng + ?Sized>(
    state: &LinkState,
    pulses: &[PulseSpec],
    p_decay: f64,
    rng: &mut R,
) -> Result<(LinkState, f64), StateError> {
    if !pulses.iter().any(PulseSpec::touches_rydberg) {
        return Ok((apply_pulses(state, pulses)?, 0.0));
    }
    let pre = state.rydberg_population();
    let after = apply_pulses(state, pulses)?;
    let post = after.rydberg_population();
    if pre > post {
        let jumped = apply_decay_channel(state, p_decay, rng)?;
        Ok((apply_pulses(&jumped, pulses)?, pre))
    } else {
        Ok((apply_decay_channel(&after, p_decay, rng)?, post))
    }
}

/// Runs the generation script and returns the initial state followed by the
/// state after every step.
pub fn generation_trace<R: Rng + ?Sized>(
    state: &LinkState,
    noise: &NoiseParams,
    rng: &mut R,
) -> Result<Vec<LinkState>, StateError> {
    let p = noise.loss_per_pulse();
    let eta_t = noise.transmission();
    let mut trace = vec![state.clone()];
    let mut current = state.clone();
    for step in generation_script() {
        current = match step {
            GenerationStep::Pulses(pulses) => apply_with_decay(&current, &pulses, p, rng)?.0,
            GenerationStep::Transfer => transfer_photon(&current, eta_t, rng)?,
        };
        trace.push(current.clone());
    }
    Ok(trace)
}

/// Steps i to xii with decay jumps and the fiber transfer.
pub fn run_generation_sequence<R: Rng + ?Sized>(
    state: &LinkState,
    noise: &NoiseParams,
    rng: &mut R,
) -> Result<LinkState, StateError> {
    Ok(generation_trace(state, noise, rng)?.pop().expect("trace is never empty"))
}

/// Heralding decision of the diagnosis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// An r_A ion was seen: an excitation is missing.
    RetryA,
    /// No r_A ion and both 1_A ions seen.
    AcceptB1,
    /// No r_A ion and at least one 1_A ion missing.
    RetryB2,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::RetryA => "retry_A",
            Verdict::AcceptB1 => "accept_B1",
            Verdict::RetryB2 => "retry_B2",
        }
    }
}

/// Verdict from the four detection results.
pub fn verdict(r_aux_k: bool, r_aux_k1: bool, one_aux_k: bool, one_aux_k1: bool) -> Verdict {
    if r_aux_k || r_aux_k1 {
        Verdict::RetryA
    } else if one_aux_k && one_aux_k1 {
        Verdict::AcceptB1
    } else {
        Verdict::RetryB2
    }
}

/// Which ionization a detection result belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Probe {
    RydbergAux(Side),
    OneAux(Side),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisResult {
    pub verdict: Verdict,
    /// Detections in the order they were performed. The 1_A probes are only
    /// run when both r_A probes came back negative.
    pub ions_seen: Vec<(Probe, bool)>,
}

/// Auxiliary preparation and diagnosis pulses on both ensembles, ensemble k
/// first. No ionization.
pub fn apply_diagnosis_pulses<R: Rng + ?Sized>(
    state: &LinkState,
    noise: &NoiseParams,
    rng: &mut R,
) -> Result<LinkState, StateError> {
    let p = noise.loss_per_pulse();
    let mut current = state.clone();
    for side in [Side::K, Side::K1] {
        for pulse in diagnosis_script(side) {
            current = apply_with_decay(&current, &[pulse], p, rng)?.0;
        }
    }
    Ok(current)
}

/// Diagnosis pulses, r_A ionizations and, if both are negative, 1_A
/// ionizations. Returns the post-measurement state and the verdict.
pub fn run_diagnosis<R: Rng + ?Sized>(
    state: &LinkState,
    noise: &NoiseParams,
    rng: &mut R,
) -> Result<(LinkState, DiagnosisResult), StateError> {
    let mut current = apply_diagnosis_pulses(state, noise, rng)?;
    let mut ions_seen = Vec::with_capacity(4);
    let mut seen = [false; 4];
    for (i, side) in [Side::K, Side::K1].into_iter().enumerate() {
        let (next, hit) = ionize_and_detect(&current, R_AUX, side, noise.eta_ion, rng)?;
        current = next;
        seen[i] = hit;
        ions_seen.push((Probe::RydbergAux(side), hit));
    }
    if !seen[0] && !seen[1] {
        for (i, side) in [Side::K, Side::K1].into_iter().enumerate() {
            let (next, hit) = ionize_and_detect(&current, ONE_A, side, noise.eta_ion, rng)?;
            current = next;
            seen[2 + i] = hit;
            ions_seen.push((Probe::OneAux(side), hit));
        }
    }
    let verdict = verdict(seen[0], seen[1], seen[2], seen[3]);
    Ok((current, DiagnosisResult { verdict, ions_seen }))
}

/// Clears both ensembles and cavities. Fresh atoms are assumed, so the
/// result is a live initial state whatever the input.
pub fn reset_subnodes(_state: &LinkState) -> LinkState {
    new_link_state()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureCause {
    Fiber,
    Decay,
    /// Correct state rejected because an ion detection missed.
    DiagnosisB2,
    /// Accepted although the state is not the target.
    FalseAccept,
}

impl FailureCause {
    pub fn name(&self) -> &'static str {
        match self {
            FailureCause::Fiber => "fiber",
            FailureCause::Decay => "decay",
            FailureCause::DiagnosisB2 => "diagnosis_B2",
            FailureCause::FalseAccept => "false_accept",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkOutcome {
    pub success: bool,
    pub rounds_consumed: u32,
    /// Seconds.
    pub elapsed: f64,
    pub failure_cause: Option<FailureCause>,
    pub verdict: Verdict,
    /// Link state after the diagnosis (auxiliary subnodes ionized).
    pub state: LinkState,
}

/// One full round: reset, generation, diagnosis, verdict.
pub fn attempt_link<R: Rng + ?Sized>(noise: &NoiseParams, rng: &mut R) -> Result<LinkOutcome, StateError> {
    let fresh = reset_subnodes(&new_link_state());
    let generated = run_generation_sequence(&fresh, noise, rng)?;
    let (state, diagnosis) = run_diagnosis(&generated, noise, rng)?;
    let correct = state.is_live() && overlap(&state, &generation_target()) >= HERALD_FIDELITY;
    let accepted = diagnosis.verdict == Verdict::AcceptB1;
    let failure_cause = match (accepted, correct, state.status()) {
        (true, true, _) => None,
        (true, false, _) => Some(FailureCause::FalseAccept),
        (false, _, Status::Lost { cause: LossCause::Fiber, .. }) => Some(FailureCause::Fiber),
        (false, _, Status::Lost { cause: LossCause::Decay, .. }) => Some(FailureCause::Decay),
        (false, _, _) => Some(FailureCause::DiagnosisB2),
    };
    Ok(LinkOutcome {
        success: failure_cause.is_none(),
        rounds_consumed: 1,
        elapsed: attempt_duration(noise),
        failure_cause,
        verdict: diagnosis.verdict,
        state,
    })
}

/// Rydberg exposures of the noiseless scripts, in units of pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseInventory {
    /// Per Rydberg-touching generation step on ensemble k.
    pub generation_k: Vec<f64>,
    /// Per Rydberg-touching generation step on ensemble k+1.
    pub generation_k1: Vec<f64>,
    /// Per diagnosis pulse, both ensembles, for a correctly entangled input.
    pub diagnosis: Vec<f64>,
}

impl PulseInventory {
    pub fn generation_total(&self) -> f64 {
        self.generation_k.iter().chain(&self.generation_k1).sum()
    }

    pub fn diagnosis_total(&self) -> f64 {
        self.diagnosis.iter().sum()
    }

    /// Probability that no decay jump fires when each pulse jumps with
    /// probability `p` × its exposure.
    pub fn survival(&self, p: f64) -> f64 {
        self.generation_k
            .iter()
            .chain(&self.generation_k1)
            .chain(&self.diagnosis)
            .map(|e| 1.0 - p * e)
            .product()
    }
}

/// Exposures charged by the decay placement rule along the noiseless run.
pub fn pulse_inventory() -> Result<PulseInventory, StateError> {
    let mut rng = crate::rng::trial_rng(0, 0);
    let mut current = new_link_state();
    let mut inv = PulseInventory {
        generation_k: Vec::new(),
        generation_k1: Vec::new(),
        diagnosis: Vec::new(),
    };
    for step in generation_script() {
        match step {
            GenerationStep::Pulses(pulses) => {
                let (next, exposure) = apply_with_decay(&current, &pulses, 0.0, &mut rng)?;
                current = next;
                match pulses[0].side {
                    Side::K => inv.generation_k.push(exposure),
                    Side::K1 => inv.generation_k1.push(exposure),
                }
            }
            GenerationStep::Transfer => current = transfer_photon(&current, 1.0, &mut rng)?,
        }
    }
    for side in [Side::K, Side::K1] {
        for pulse in diagnosis_script(side) {
            let (next, exposure) = apply_with_decay(&current, &[pulse], 0.0, &mut rng)?;
            current = next;
            inv.diagnosis.push(exposure);
        }
    }
    Ok(inv)
}

/// Success probability of [`attempt_link`] implied by the coded scripts:
/// η_t × (no decay jump) × η_ion². Only the two 1_A detections can miss;
/// the r_A checks on a correct state are negative with certainty.
pub fn coded_success_probability(noise: &NoiseParams) -> Result<f64, StateError> {
    let inv = pulse_inventory()?;
    Ok(noise.transmission() * inv.survival(noise.loss_per_pulse()) * noise.eta_ion * noise.eta_ion)
}

/// Probability that [`run_generation_sequence`] ends live: η_t × (no decay
/// jump during generation).
pub fn coded_generation_live_probability(noise: &NoiseParams) -> Result<f64, StateError> {
    let inv = pulse_inventory()?;
    let p = noise.loss_per_pulse();
    let survive: f64 = inv
        .generation_k
        .iter()
        .chain(&inv.generation_k1)
        .map(|e| 1.0 - p * e)
        .product();
    Ok(noise.transmission() * survive)
}

/// One line of the link trial log.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTrialRecord {
    pub round: u64,
    pub verdict: Verdict,
    pub failure_cause: Option<FailureCause>,
    pub elapsed: f64,
}

impl LinkTrialRecord {
    pub fn new(round: u64, outcome: &LinkOutcome) -> Self {
        LinkTrialRecord {
            round,
            verdict: outcome.verdict,
            failure_cause: outcome.failure_cause,
            elapsed: outcome.elapsed,
        }
    }
}

impl CsvRecord for LinkTrialRecord {
    fn csv_header() -> &'static str {
        "round,verdict,failure_cause,elapsed_s"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.round,
            self.verdict.name(),
            self.failure_cause.map_or("none", |c| c.name()),
            fmt_float(self.elapsed)
        )
    }
}

/// Runs `trials` independent attempts in parallel; attempt `j` draws from
/// [`trial_rng`]`(seed, j)` and records come back in attempt order.
pub fn run_link_trials(noise: &NoiseParams, trials: usize, seed: u64) -> Result<Vec<LinkTrialRecord>, StateError> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| attempt_link(noise, &mut trial_rng(seed, t)).map(|o| LinkTrialRecord::new(t, &o)))
        .collect()
}

impl LinkTrialRecord {
    pub fn success(&self) -> bool {
        self.verdict == Verdict::AcceptB1 && self.failure_cause.is_none()
    }
}
