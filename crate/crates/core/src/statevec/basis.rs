use std::fmt;
use std::str::FromStr;

use crate::error::StateError;

/// Logical subnode encoded in one ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subnode {
    L,
    R,
    A,
}

impl Subnode {
    fn letter(self) -> char {
        match self {
            Subnode::L => 'L',
            Subnode::R => 'R',
            Subnode::A => 'A',
        }
    }
}

/// The three Rydberg levels r₋, r₊ and r_A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RydbergLevel {
    Minus,
    Plus,
    Aux,
}

impl RydbergLevel {
    pub const ALL: [RydbergLevel; 3] = [RydbergLevel::Minus, RydbergLevel::Plus, RydbergLevel::Aux];

    fn tag(self) -> &'static str {
        match self {
            RydbergLevel::Minus => "r-",
            RydbergLevel::Plus => "r+",
            RydbergLevel::Aux => "rA",
        }
    }
}

/// Atomic level addressed by a pulse or an ionization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    /// The reservoir |s⟩, populated by every atom not otherwise excited.
    Reservoir,
    Zero(Subnode),
    One(Subnode),
    Rydberg(RydbergLevel),
}

impl Level {
    pub fn is_rydberg(self) -> bool {
        matches!(self, Level::Rydberg(_))
    }

    fn metastable_bit(self) -> Option<u8> {
        let (subnode, one) = match self {
            Level::Zero(s) => (s, 0),
            Level::One(s) => (s, 1),
            _ => return None,
        };
        let base = match subnode {
            Subnode::L => 0,
            Subnode::R => 2,
            Subnode::A => 4,
        };
        Some(1 << (base + one))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Reservoir => f.write_str("s"),
            Level::Zero(s) => write!(f, "0{}", s.letter()),
            Level::One(s) => write!(f, "1{}", s.letter()),
            Level::Rydberg(r) => f.write_str(r.tag()),
        }
    }
}

const METASTABLE: [Level; 6] = [
    Level::Zero(Subnode::L),
    Level::One(Subnode::L),
    Level::Zero(Subnode::R),
    Level::One(Subnode::R),
    Level::Zero(Subnode::A),
    Level::One(Subnode::A),
];

/// Collective occupation pattern of one ensemble in the blockaded subspace.
///
/// Each metastable level holds 0 or 1 atoms and at most one Rydberg level is
/// occupied; all remaining atoms sit in the reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EnsembleConfig {
    metastable: u8,
    ryd: Option<RydbergLevel>,
}

impl EnsembleConfig {
    /// All atoms in the reservoir.
    pub fn reservoir() -> Self {
        EnsembleConfig::default()
    }

    /// Builder-style helper: the same configuration with `level` occupied.
    ///
    /// Panics if the level is already occupied, is the reservoir, or would
    /// add a second Rydberg excitation.
    pub fn with(mut self, level: Level) -> Self {
        assert!(self.put(level), "cannot add {level} to {self}");
        self
    }

    pub fn rydberg(&self) -> Option<RydbergLevel> {
        self.ryd
    }

    /// Occupation number of `level` (the reservoir reports 0).
    pub fn occupation(&self, level: Level) -> u8 {
        match level {
            Level::Reservoir => 0,
            Level::Rydberg(r) => u8::from(self.ryd == Some(r)),
            _ => u8::from(self.metastable & level.metastable_bit().unwrap() != 0),
        }
    }

    pub fn is_occupied(&self, level: Level) -> bool {
        self.occupation(level) == 1
    }

    /// Number of atoms outside the reservoir.
    pub fn excitations(&self) -> u32 {
        self.metastable.count_ones() + u32::from(self.ryd.is_some())
    }

    /// Removes one atom from `level`. Returns false if the level is empty.
    pub(crate) fn take(&mut self, level: Level) -> bool {
        match level {
            Level::Reservoir => true,
            Level::Rydberg(r) => {
                if self.ryd == Some(r) {
                    self.ryd = None;
                    true
                } else {
                    false
                }
            }
            _ => {
                let bit = level.metastable_bit().unwrap();
                if self.metastable & bit != 0 {
                    self.metastable &= !bit;
                    true
                } else {
                    false
                }
            }
        }
    }

    /// Adds one atom to `level`. Returns false if the level is full or, for a
    /// Rydberg level, if any Rydberg level is already occupied (blockade).
    pub(crate) fn put(&mut self, level: Level) -> bool {
        match level {
            Level::Reservoir => true,
            Level::Rydberg(r) => {
                if self.ryd.is_none() {
                    self.ryd = Some(r);
                    true
                } else {
                    false
                }
            }
            _ => {
                let bit = level.metastable_bit().unwrap();
                if self.metastable & bit == 0 {
                    self.metastable |= bit;
                    true
                } else {
                    false
                }
            }
        }
    }
}

impl fmt::Display for EnsembleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = METASTABLE
            .iter()
            .filter(|l| self.is_occupied(**l))
            .map(|l| l.to_string())
            .collect();
        if let Some(r) = self.ryd {
            parts.push(r.tag().to_string());
        }
        if parts.is_empty() {
            f.write_str("s")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

impl FromStr for EnsembleConfig {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut config = EnsembleConfig::reservoir();
        if s == "s" {
            return Ok(config);
        }
        // every tag is two characters; tags are joined by '+'
        let bad = || StateError::LabelParse(s.to_string());
        let mut rest = s;
        loop {
            let part = rest.get(..2).ok_or_else(bad)?;
            let level = match part {
                "r-" => Level::Rydberg(RydbergLevel::Minus),
                "r+" => Level::Rydberg(RydbergLevel::Plus),
                "rA" => Level::Rydberg(RydbergLevel::Aux),
                other => *METASTABLE.iter().find(|l| l.to_string() == other).ok_or_else(bad)?,
            };
            if !config.put(level) {
                return Err(bad());
            }
            rest = &rest[2..];
            if rest.is_empty() {
                break;
            }
            rest = rest.strip_prefix('+').ok_or_else(bad)?;
        }
        Ok(config)
    }
}

/// Polarization mode of a cavity photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CavityMode {
    Plus,
    Minus,
}

impl CavityMode {
    /// The Rydberg level whose emission feeds this mode.
    pub fn rydberg(self) -> RydbergLevel {
        match self {
            CavityMode::Plus => RydbergLevel::Plus,
            CavityMode::Minus => RydbergLevel::Minus,
        }
    }
}

/// Photon numbers of the two cavity modes (each capped at one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CavityConfig {
    pub n_plus: u8,
    pub n_minus: u8,
}

impl CavityConfig {
    pub fn vacuum() -> Self {
        CavityConfig::default()
    }

    pub fn one(mode: CavityMode) -> Self {
        let mut c = CavityConfig::vacuum();
        c.set(mode, 1);
        c
    }

    pub fn photons(&self, mode: CavityMode) -> u8 {
        match mode {
            CavityMode::Plus => self.n_plus,
            CavityMode::Minus => self.n_minus,
        }
    }

    pub fn total(&self) -> u32 {
        u32::from(self.n_plus) + u32::from(self.n_minus)
    }

    pub(crate) fn set(&mut self, mode: CavityMode, n: u8) {
        match mode {
            CavityMode::Plus => self.n_plus = n,
            CavityMode::Minus => self.n_minus = n,
        }
    }
}

impl fmt::Display for CavityConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.n_plus, self.n_minus) {
            (0, 0) => f.write_str("vac"),
            (1, 0) => f.write_str("+"),
            (0, 1) => f.write_str("-"),
            _ => f.write_str("+-"),
        }
    }
}

impl FromStr for CavityConfig {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n_plus, n_minus) = match s {
            "vac" => (0, 0),
            "+" => (1, 0),
            "-" => (0, 1),
            "+-" => (1, 1),
            _ => return Err(StateError::LabelParse(s.to_string())),
        };
        Ok(CavityConfig { n_plus, n_minus })
    }
}

/// Which end of the link an operation addresses: node k or node k+1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    K,
    K1,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::K => "k",
            Side::K1 => "k+1",
        }
    }
}

/// Joint basis label of the two ensembles and their cavities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BasisLabel {
    pub ensemble_k: EnsembleConfig,
    pub cavity_k: CavityConfig,
    pub ensemble_k1: EnsembleConfig,
    pub cavity_k1: CavityConfig,
}

impl BasisLabel {
    pub fn new(
        ensemble_k: EnsembleConfig,
        cavity_k: CavityConfig,
        ensemble_k1: EnsembleConfig,
        cavity_k1: CavityConfig,
    ) -> Self {
        BasisLabel {
            ensemble_k,
            cavity_k,
            ensemble_k1,
            cavity_k1,
        }
    }

    pub fn ensemble(&self, side: Side) -> &EnsembleConfig {
        match side {
            Side::K => &self.ensemble_k,
            Side::K1 => &self.ensemble_k1,
        }
    }

    pub fn ensemble_mut(&mut self, side: Side) -> &mut EnsembleConfig {
        match side {
            Side::K => &mut self.ensemble_k,
            Side::K1 => &mut self.ensemble_k1,
        }
    }

    pub fn cavity(&self, side: Side) -> &CavityConfig {
        match side {
            Side::K => &self.cavity_k,
            Side::K1 => &self.cavity_k1,
        }
    }

    pub fn cavity_mut(&mut self, side: Side) -> &mut CavityConfig {
        match side {
            Side::K => &mut self.cavity_k,
            Side::K1 => &mut self.cavity_k1,
        }
    }

    /// Metastable occupations + Rydberg excitations + photons.
    pub fn excitations(&self) -> u32 {
        self.ensemble_k.excitations()
            + self.ensemble_k1.excitations()
            + self.cavity_k.total()
            + self.cavity_k1.total()
    }

    pub fn has_rydberg(&self) -> bool {
        self.ensemble_k.ryd.is_some() || self.ensemble_k1.ryd.is_some()
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}|{}|{}",
            self.ensemble_k, self.cavity_k, self.ensemble_k1, self.cavity_k1
        )
    }
}

impl FromStr for BasisLabel {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != 4 {
            return Err(StateError::LabelParse(s.to_string()));
        }
        Ok(BasisLabel {
            ensemble_k: parts[0].parse()?,
            cavity_k: parts[1].parse()?,
            ensemble_k1: parts[2].parse()?,
            cavity_k1: parts[3].parse()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_string_round_trips() {
        let label = BasisLabel::new(
            EnsembleConfig::reservoir()
                .with(Level::One(Subnode::R))
                .with(Level::Rydberg(RydbergLevel::Aux)),
            CavityConfig::one(CavityMode::Minus),
            EnsembleConfig::reservoir(),
            CavityConfig::vacuum(),
        );
        let text = label.to_string();
        assert_eq!(text, "1R+rA|-|s|vac");
        assert_eq!(text.parse::<BasisLabel>().unwrap(), label);
    }

    #[test]
    fn blockade_rejects_second_rydberg() {
        let mut e = EnsembleConfig::reservoir().with(Level::Rydberg(RydbergLevel::Minus));
        assert!(!e.put(Level::Rydberg(RydbergLevel::Plus)));
        assert!(!e.put(Level::Rydberg(RydbergLevel::Minus)));
        assert_eq!(e.rydberg(), Some(RydbergLevel::Minus));
        assert!("r-+r+|vac|s|vac".parse::<BasisLabel>().is_err());
    }

    #[test]
    fn excitation_count() {
        let label: BasisLabel = "0R+r+|+|1L|vac".parse().unwrap();
        assert_eq!(label.excitations(), 4);
        assert!(label.has_rydberg());
    }
}
