use std::f64::consts::PI;

use super::basis::{BasisLabel, CavityMode, Level, Side};
use crate::error::StateError;

/// A laser (or laser + cavity) pulse on one ensemble.
///
/// The pulse drives a rotation of area `angle` on every pair of basis labels
/// (source, target) it couples, where the target is obtained by moving one
/// atom from `from` to `to`. With the gauge used here a π pulse maps
/// source → target and target → −source, so successive forward transfers
/// stay real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub side: Side,
    pub from: Level,
    pub to: Level,
    pub angle: f64,
    /// Cavity mode exchanged with the reservoir side of the transition.
    pub cavity_mode: Option<CavityMode>,
    /// √N_a-enhanced transition out of (or into) the reservoir.
    pub collective: bool,
}

impl PulseSpec {
    /// A π pulse `from → to` on one ensemble. Transitions touching the
    /// reservoir are marked collective.
    pub fn pi(side: Side, from: Level, to: Level) -> Self {
        PulseSpec {
            side,
            from,
            to,
            angle: PI,
            cavity_mode: None,
            collective: from == Level::Reservoir || to == Level::Reservoir,
        }
    }

    pub fn with_angle(mut self, angle: f64) -> Self {
        self.angle = angle;
        self
    }

    pub fn with_cavity(mut self, mode: CavityMode) -> Self {
        self.cavity_mode = Some(mode);
        self
    }

    pub fn touches_rydberg(&self) -> bool {
        self.from.is_rydberg() || self.to.is_rydberg()
    }

    pub fn validate(&self) -> Result<(), StateError> {
        let bad = |msg: String| Err(StateError::MalformedPulse(msg));
        if !self.angle.is_finite() {
            return bad(format!("angle {} is not finite", self.angle));
        }
        if self.from == self.to {
            return bad(format!("{} -> {} couples a level to itself", self.from, self.to));
        }
        let pair = (self.from, self.to);
        match pair {
            (Level::Rydberg(_), Level::Rydberg(_)) => {
                return bad(format!("{} -> {}: no Rydberg-Rydberg transition", self.from, self.to))
            }
            (Level::Reservoir, Level::Rydberg(_)) | (Level::Rydberg(_), Level::Reservoir) => {}
            (Level::Reservoir, _) | (_, Level::Reservoir) => {
                return bad(format!(
                    "{} -> {}: the reservoir only couples to Rydberg levels",
                    self.from, self.to
                ))
            }
            (Level::Zero(a), Level::One(b)) | (Level::One(a), Level::Zero(b)) if a != b => {
                return bad(format!("{} -> {}: crosses subnodes", self.from, self.to))
            }
            (Level::Zero(_), Level::Zero(_)) | (Level::One(_), Level::One(_)) => {
                return bad(format!("{} -> {}: not a qubit transition", self.from, self.to))
            }
            _ => {}
        }
        let touches_reservoir = self.from == Level::Reservoir || self.to == Level::Reservoir;
        if let Some(mode) = self.cavity_mode {
            if !touches_reservoir {
                return bad(format!(
                    "{} -> {}: cavity mode on a transition not touching the reservoir",
                    self.from, self.to
                ));
            }
            let ryd = if self.from == Level::Reservoir { self.to } else { self.from };
            if ryd != Level::Rydberg(mode.rydberg()) {
                return bad(format!("{} -> {}: mode {mode:?} does not couple to {ryd}", self.from, self.to));
            }
        }
        if self.collective && !touches_reservoir {
            return bad(format!(
                "{} -> {}: collective enhancement needs the reservoir",
                self.from, self.to
            ));
        }
        Ok(())
    }

    fn shift(&self, label: &BasisLabel, src: Level, dst: Level) -> Option<BasisLabel> {
        let mut next = *label;
        if let Some(mode) = self.cavity_mode {
            let cavity = next.cavity_mut(self.side);
            if src == Level::Reservoir {
                // absorption
                if cavity.photons(mode) != 1 {
                    return None;
                }
                cavity.set(mode, 0);
            } else {
                // emission
                if cavity.photons(mode) != 0 {
                    return None;
                }
                cavity.set(mode, 1);
            }
        }
        let ensemble = next.ensemble_mut(self.side);
        if ensemble.take(src) && ensemble.put(dst) {
            Some(next)
        } else {
            None
        }
    }

    /// Target label when `label` plays the source role.
    pub fn forward(&self, label: &BasisLabel) -> Option<BasisLabel> {
        self.shift(label, self.from, self.to)
    }

    /// Source label when `label` plays the target role.
    pub fn backward(&self, label: &BasisLabel) -> Option<BasisLabel> {
        self.shift(label, self.to, self.from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::basis::{RydbergLevel, Subnode};

    #[test]
    fn cavity_on_metastable_transition_is_rejected() {
        let p = PulseSpec::pi(Side::K, Level::Zero(Subnode::R), Level::Rydberg(RydbergLevel::Minus))
            .with_cavity(CavityMode::Minus);
        assert!(matches!(p.validate(), Err(StateError::MalformedPulse(_))));
    }

    #[test]
    fn mode_must_match_rydberg_level() {
        let p = PulseSpec::pi(Side::K, Level::Rydberg(RydbergLevel::Plus), Level::Reservoir)
            .with_cavity(CavityMode::Minus);
        assert!(p.validate().is_err());
        let ok = PulseSpec::pi(Side::K, Level::Rydberg(RydbergLevel::Plus), Level::Reservoir)
            .with_cavity(CavityMode::Plus);
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn structural_rejections() {
        let r = Level::Rydberg(RydbergLevel::Minus);
        assert!(PulseSpec::pi(Side::K, r, r).validate().is_err());
        assert!(PulseSpec::pi(Side::K, r, Level::Rydberg(RydbergLevel::Aux)).validate().is_err());
        assert!(PulseSpec::pi(Side::K, Level::Reservoir, Level::Zero(Subnode::A)).validate().is_err());
        assert!(PulseSpec::pi(Side::K, Level::Zero(Subnode::A), Level::One(Subnode::L)).validate().is_err());
        assert!(PulseSpec::pi(Side::K, Level::Zero(Subnode::A), Level::One(Subnode::A)).validate().is_ok());
    }

    #[test]
    fn emission_and_absorption_move_the_photon() {
        let emit = PulseSpec::pi(Side::K, Level::Rydberg(RydbergLevel::Minus), Level::Reservoir)
            .with_cavity(CavityMode::Minus);
        let start: BasisLabel = "r-|vac|s|vac".parse().unwrap();
        let end = emit.forward(&start).unwrap();
        assert_eq!(end.to_string(), "s|-|s|vac");
        assert_eq!(emit.backward(&end), Some(start));
        assert_eq!(start.excitations(), end.excitations());
        // blockade: r+ present, emission into minus impossible and absorption blocked
        let blocked: BasisLabel = "r+|vac|s|vac".parse().unwrap();
        assert_eq!(emit.forward(&blocked), None);
        assert_eq!(emit.backward(&blocked), None);
    }
}
