//! State-vector engine for one link: ensemble k with its cavity and
//! ensemble k+1 with its cavity, restricted to the symmetric blockaded
//! subspace (every collective occupation and photon number is 0 or 1, at most
//! one Rydberg excitation per ensemble).
//!
//! Noise enters as quantum jumps. Each stochastic operation takes an explicit
//! generator; the post-jump conditional state is kept so that later
//! operations (in particular the diagnosis) act on what is physically there.

mod basis;
mod pulse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

pub use basis::{BasisLabel, CavityConfig, CavityMode, EnsembleConfig, Level, RydbergLevel, Side, Subnode};
pub use pulse::PulseSpec;

use crate::error::StateError;

/// Amplitudes with |a|² below this are dropped after every operation.
const PRUNE_NORM_SQR: f64 = 1e-30;

/// Cause of a trajectory jump that removed an excitation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossCause {
    Fiber,
    Decay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Live,
    /// A jump removed an excitation. The amplitudes hold the post-jump state.
    Lost { side: Side, cause: LossCause },
    /// Subnodes were cleared and must be re-prepared before use.
    Reset,
}

/// Complex amplitudes over the joint basis of one link plus a trajectory flag.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    amplitudes: BTreeMap<BasisLabel, Complex64>,
    status: Status,
}

/// Both ensembles in the reservoir and both cavities empty.
pub fn new_link_state() -> LinkState {
    LinkState::basis(BasisLabel::default())
}

impl LinkState {
    /// The single basis state `label` with amplitude 1.
    pub fn basis(label: BasisLabel) -> Self {
        LinkState::from_amplitudes([(label, Complex64::new(1.0, 0.0))])
    }

    /// Builds a live state from amplitudes (not renormalized). Repeated labels add up.
    pub fn from_amplitudes<I>(amplitudes: I) -> Self
    where
        I: IntoIterator<Item = (BasisLabel, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (label, amp) in amplitudes {
            *map.entry(label).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        let mut state = LinkState {
            amplitudes: map,
            status: Status::Live,
        };
        state.prune();
        state
    }

    /// Equal-weight real superposition of `labels`.
    pub fn superposition(labels: &[BasisLabel]) -> Self {
        let a = Complex64::new(1.0 / (labels.len() as f64).sqrt(), 0.0);
        LinkState::from_amplitudes(labels.iter().map(|l| (*l, a)))
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_live(&self) -> bool {
        self.status == Status::Live
    }

    /// Flags the state as cleared by state-selective ionization.
    pub fn mark_reset(&mut self) {
        self.status = Status::Reset;
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.amplitudes.get(label).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisLabel, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Total probability of some Rydberg level being occupied.
    pub fn rydberg_population(&self) -> f64 {
        self.population(|l| l.has_rydberg())
    }

    /// Probability of at least one cavity photon.
    pub fn photon_population(&self) -> f64 {
        self.population(|l| l.cavity_k.total() + l.cavity_k1.total() > 0)
    }

    pub fn population<F: Fn(&BasisLabel) -> bool>(&self, pred: F) -> f64 {
        self.amplitudes
            .iter()
            .filter(|(l, _)| pred(l))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// ⟨other|self⟩.
    pub fn inner(&self, other: &LinkState) -> Complex64 {
        self.amplitudes
            .iter()
            .map(|(l, a)| other.amplitude(l).conj() * a)
            .sum()
    }

    /// One line per basis label: `label,re,im` with 17 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (label, a) in &self.amplitudes {
            writeln!(out, "{label},{:.16e},{:.16e}", a.re, a.im).unwrap();
        }
        out
    }

    /// Parses the output of [`LinkState::dump`]; the result is live.
    pub fn parse_dump(text: &str) -> Result<Self, StateError> {
        let mut amps = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            let bad = || StateError::LabelParse(line.to_string());
            if fields.len() != 3 {
                return Err(bad());
            }
            let label: BasisLabel = fields[0].parse()?;
            let re: f64 = fields[1].trim().parse().map_err(|_| bad())?;
            let im: f64 = fields[2].trim().parse().map_err(|_| bad())?;
            amps.push((label, Complex64::new(re, im)));
        }
        Ok(LinkState::from_amplitudes(amps))
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm_sqr() >= PRUNE_NORM_SQR);
    }

    fn renormalize(&mut self) {
        self.prune();
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for a in self.amplitudes.values_mut() {
                *a /= norm;
            }
        }
    }

    fn ensure_usable(&self) -> Result<(), StateError> {
        if self.status == Status::Reset {
            Err(StateError::ResetState)
        } else {
            Ok(())
        }
    }

    fn mark_lost(&mut self, side: Side, cause: LossCause) {
        if self.status == Status::Live {
            self.status = Status::Lost { side, cause };
        }
    }
}

/// |⟨reference|state⟩|², insensitive to global phase.
pub fn overlap(state: &LinkState, reference: &LinkState) -> f64 {
    state.inner(reference).norm_sqr()
}

fn check_probability(name: &'static str, value: f64) -> Result<(), StateError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(StateError::InvalidProbability { name, value })
    }
}

/// Applies a single pulse.
pub fn apply_pulse(state: &LinkState, pulse: &PulseSpec) -> Result<LinkState, StateError> {
    apply_pulses(state, std::slice::from_ref(pulse))
}

/// Applies several pulses driven at the same time.
///
/// The generator Σ_p (angle_p / 2)·(|target⟩⟨source| − h.c.) is exponentiated
/// exactly on each connected group of coupled labels. Groups must be stars
/// (one label coupled to all others), which covers single pulses and
/// simultaneous pulses out of a shared source.
pub fn apply_pulses(state: &LinkState, pulses: &[PulseSpec]) -> Result<LinkState, StateError> {
    state.ensure_usable()?;
    for p in pulses {
        p.validate()?;
    }

    // (pulse index, source, target)
    let mut edges: BTreeSet<(usize, BasisLabel, BasisLabel)> = BTreeSet::new();
    let mut adjacency: BTreeMap<BasisLabel, BTreeSet<BasisLabel>> = BTreeMap::new();
    let mut seen: BTreeSet<BasisLabel> = BTreeSet::new();
    let mut queue: Vec<BasisLabel> = state.amplitudes.keys().copied().collect();
    while let Some(label) = queue.pop() {
        if !seen.insert(label) {
            continue;
        }
        for (i, p) in pulses.iter().enumerate() {
            let (s, t) = if let Some(t) = p.forward(&label) {
                (label, t)
            } else if let Some(s) = p.backward(&label) {
                (s, label)
            } else {
                continue;
            };
            edges.insert((i, s, t));
            adjacency.entry(s).or_default().insert(t);
            adjacency.entry(t).or_default().insert(s);
            queue.push(if label == s { t } else { s });
        }
    }
    let mut weights: BTreeMap<(BasisLabel, BasisLabel), f64> = BTreeMap::new();
    for (i, s, t) in &edges {
        *weights.entry((*s, *t)).or_insert(0.0) += pulses[*i].angle / 2.0;
    }

    let mut out = state.clone();
    let mut done: BTreeSet<BasisLabel> = BTreeSet::new();
    for start in adjacency.keys() {
        if done.contains(start) {
            continue;
        }
        let mut component = vec![*start];
        let mut stack = vec![*start];
        done.insert(*start);
        while let Some(l) = stack.pop() {
            for n in &adjacency[&l] {
                if done.insert(*n) {
                    component.push(*n);
                    stack.push(*n);
                }
            }
        }
        rotate_star(&mut out, &component, &adjacency, &weights)?;
    }
    out.prune();
    Ok(out)
}

fn rotate_star(
    state: &mut LinkState,
    component: &[BasisLabel],
    adjacency: &BTreeMap<BasisLabel, BTreeSet<BasisLabel>>,
    weights: &BTreeMap<(BasisLabel, BasisLabel), f64>,
) -> Result<(), StateError> {
    let size = component.len();
    let center = *component
        .iter()
        .find(|l| adjacency[*l].len() == size - 1)
        .ok_or(StateError::UnsupportedCoupling(size))?;
    let leaves: Vec<BasisLabel> = component.iter().copied().filter(|l| *l != center).collect();
    if leaves.iter().any(|l| adjacency[l].len() != 1) {
        return Err(StateError::UnsupportedCoupling(size));
    }
    // G = Σ c_j (|leaf_j⟩⟨center| − |center⟩⟨leaf_j|)
    let coeffs: Vec<f64> = leaves
        .iter()
        .map(|leaf| {
            weights.get(&(center, *leaf)).copied().unwrap_or(0.0)
                - weights.get(&(*leaf, center)).copied().unwrap_or(0.0)
        })
        .collect();
    let c = coeffs.iter().map(|x| x * x).sum::<f64>().sqrt();
    if c == 0.0 {
        return Ok(());
    }
    let (sin, cos) = c.sin_cos();
    let a_center = state.amplitude(&center);
    let a_leaves: Vec<Complex64> = leaves.iter().map(|l| state.amplitude(l)).collect();
    let a_bright: Complex64 = coeffs.iter().zip(&a_leaves).map(|(cj, a)| a * (cj / c)).sum();
    let new_center = a_center * cos - a_bright * sin;
    let new_bright = a_center * sin + a_bright * cos;
    let delta = new_bright - a_bright;
    state.amplitudes.insert(center, new_center);
    for ((leaf, a), cj) in leaves.iter().zip(&a_leaves).zip(&coeffs) {
        state.amplitudes.insert(*leaf, a + delta * (cj / c));
    }
    Ok(())
}

/// Sends the cavity-k photon through the fiber to cavity k+1.
///
/// A loss jump happens with probability (1 − η_t) × photon population; the
/// environment then records the photon's mode (Born-sampled), the photon is
/// annihilated and the state is marked lost on the k+1 side. Otherwise every
/// photon moves to the same mode of cavity k+1.
pub fn transfer_photon<R: Rng + ?Sized>(
    state: &LinkState,
    eta_t: f64,
    rng: &mut R,
) -> Result<LinkState, StateError> {
    state.ensure_usable()?;
    check_probability("eta_t", eta_t)?;
    for label in state.amplitudes.keys() {
        if label.cavity_k.total() > 1 {
            return Err(StateError::PhotonPrecondition(format!(
                "{label}: more than one photon in cavity k"
            )));
        }
    }
    let photon_weight = |mode: CavityMode| state.population(|l| l.cavity_k.photons(mode) == 1);
    let (w_plus, w_minus) = (photon_weight(CavityMode::Plus), photon_weight(CavityMode::Minus));
    let carrying = w_plus + w_minus;

    if carrying > 0.0 && rng.random::<f64>() < (1.0 - eta_t) * carrying {
        let mode = if rng.random::<f64>() * carrying < w_plus {
            CavityMode::Plus
        } else {
            CavityMode::Minus
        };
        let mut out = LinkState::from_amplitudes(state.amplitudes.iter().filter_map(|(l, a)| {
            (l.cavity_k.photons(mode) == 1).then(|| {
                let mut l = *l;
                l.cavity_k.set(mode, 0);
                (l, *a)
            })
        }));
        out.status = state.status;
        out.renormalize();
        out.mark_lost(Side::K1, LossCause::Fiber);
        return Ok(out);
    }

    let mut moved = Vec::with_capacity(state.amplitudes.len());
    for (label, a) in &state.amplitudes {
        let mut l = *label;
        for mode in [CavityMode::Plus, CavityMode::Minus] {
            if l.cavity_k.photons(mode) == 1 {
                if l.cavity_k1.photons(mode) == 1 {
                    return Err(StateError::PhotonPrecondition(format!(
                        "{label}: mode {mode:?} of cavity k+1 already occupied"
                    )));
                }
                l.cavity_k.set(mode, 0);
                l.cavity_k1.set(mode, 1);
            }
        }
        moved.push((l, *a));
    }
    let mut out = LinkState::from_amplitudes(moved);
    out.status = state.status;
    Ok(out)
}

/// Spontaneous-emission channel with per-excitation jump probability `p_decay`.
///
/// The jump fires with probability `p_decay` × Rydberg population. The decay
/// channel (ensemble, Rydberg level) is Born-sampled and its jump operator
/// |s⟩⟨r| is applied: the atom returns to the reservoir and branches without
/// that excitation are projected out. No-jump back-action is neglected.
pub fn apply_decay_channel<R: Rng + ?Sized>(
    state: &LinkState,
    p_decay: f64,
    rng: &mut R,
) -> Result<LinkState, StateError> {
    state.ensure_usable()?;
    check_probability("p_decay", p_decay)?;
    let mut channels: Vec<(Side, RydbergLevel, f64)> = Vec::new();
    for side in [Side::K, Side::K1] {
        for r in RydbergLevel::ALL {
            let w = state.population(|l| l.ensemble(side).rydberg() == Some(r));
            if w > 0.0 {
                channels.push((side, r, w));
            }
        }
    }
    let total: f64 = channels.iter().map(|c| c.2).sum();
    if total == 0.0 || rng.random::<f64>() >= p_decay * total {
        return Ok(state.clone());
    }
    let mut pick = rng.random::<f64>() * total;
    let mut chosen = channels[channels.len() - 1];
    for c in &channels {
        if pick < c.2 {
            chosen = *c;
            break;
        }
        pick -= c.2;
    }
    let (side, level, _) = chosen;
    let mut out = LinkState::from_amplitudes(state.amplitudes.iter().filter_map(|(l, a)| {
        let mut l = *l;
        l.ensemble_mut(side)
            .take(Level::Rydberg(level))
            .then_some((l, *a))
    }));
    out.status = state.status;
    out.renormalize();
    out.mark_lost(side, LossCause::Decay);
    Ok(out)
}

/// State-selective ionization of `level` in one ensemble followed by ion
/// detection with efficiency `eta_ion`.
///
/// The occupancy is Born-sampled. If occupied, the atom is ejected (the level
/// empties) and an ion is registered with probability `eta_ion`; an empty
/// level never produces a count.
pub fn ionize_and_detect<R: Rng + ?Sized>(
    state: &LinkState,
    level: Level,
    side: Side,
    eta_ion: f64,
    rng: &mut R,
) -> Result<(LinkState, bool), StateError> {
    state.ensure_usable()?;
    check_probability("eta_ion", eta_ion)?;
    if level == Level::Reservoir {
        return Err(StateError::NotIonizable(level.to_string()));
    }
    let p_occupied = state.population(|l| l.ensemble(side).is_occupied(level));
    let occupied = p_occupied > 0.0 && rng.random::<f64>() < p_occupied;
    let mut out = LinkState::from_amplitudes(state.amplitudes.iter().filter_map(|(l, a)| {
        let mut l = *l;
        let was = l.ensemble_mut(side).take(level);
        (was == occupied).then_some((l, *a))
    }));
    out.status = state.status;
    out.renormalize();
    let detected = occupied && rng.random::<f64>() < eta_ion;
    Ok((out, detected))
}
