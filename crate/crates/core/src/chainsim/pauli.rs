use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

/// Pauli correction applied to the last subnode, up to a global phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PauliWord {
    #[default]
    I,
    X,
    Z,
    /// σz·σx.
    ZX,
}

impl PauliWord {
    pub const ALL: [PauliWord; 4] = [PauliWord::I, PauliWord::X, PauliWord::Z, PauliWord::ZX];

    fn bits(self) -> (bool, bool) {
        match self {
            PauliWord::I => (false, false),
            PauliWord::X => (true, false),
            PauliWord::Z => (false, true),
            PauliWord::ZX => (true, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliWord::I,
            (true, false) => PauliWord::X,
            (false, true) => PauliWord::Z,
            (true, true) => PauliWord::ZX,
        }
    }

    /// Product of two words, phase dropped.
    pub fn compose(self, other: PauliWord) -> PauliWord {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        PauliWord::from_bits(x1 ^ x2, z1 ^ z2)
    }

    /// 2×2 matrix, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        match self {
            PauliWord::I => [[l, o], [o, l]],
            PauliWord::X => [[o, l], [l, o]],
            PauliWord::Z => [[l, o], [o, -l]],
            PauliWord::ZX => [[o, l], [-l, o]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PauliWord::I => "I",
            PauliWord::X => "X",
            PauliWord::Z => "Z",
            PauliWord::ZX => "ZX",
        }
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One of the four Bell states of the end pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BellLabel {
    /// (|00⟩ + |11⟩)/√2
    #[default]
    PhiPlus,
    /// (|00⟩ − |11⟩)/√2
    PhiMinus,
    /// (|01⟩ + |10⟩)/√2
    PsiPlus,
    /// (|01⟩ − |10⟩)/√2
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    /// The state (I ⊗ W)Φ⁺, up to phase.
    pub fn from_pauli(w: PauliWord) -> Self {
        match w {
            PauliWord::I => BellLabel::PhiPlus,
            PauliWord::X => BellLabel::PsiPlus,
            PauliWord::Z => BellLabel::PhiMinus,
            PauliWord::ZX => BellLabel::PsiMinus,
        }
    }

    /// Correction W such that (I ⊗ W)Φ⁺ is this state.
    pub fn pauli(self) -> PauliWord {
        match self {
            BellLabel::PhiPlus => PauliWord::I,
            BellLabel::PsiPlus => PauliWord::X,
            BellLabel::PhiMinus => PauliWord::Z,
            BellLabel::PsiMinus => PauliWord::ZX,
        }
    }

    /// Amplitudes in the order |00⟩, |01⟩, |10⟩, |11⟩.
    pub fn vector(self) -> [Complex64; 4] {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let o = Complex64::new(0.0, 0.0);
        match self {
            BellLabel::PhiPlus => [h, o, o, h],
            BellLabel::PhiMinus => [h, o, o, -h],
            BellLabel::PsiPlus => [o, h, h, o],
            BellLabel::PsiMinus => [o, h, -h, o],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "Phi+",
            BellLabel::PhiMinus => "Phi-",
            BellLabel::PsiPlus => "Psi+",
            BellLabel::PsiMinus => "Psi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BellLabel::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown Bell label {s:?}"))
    }
}

/// W_k for the measured bits (i_L, i_R) of one intermediate node.
pub fn correction_for(i_l: u8, i_r: u8) -> PauliWord {
    match (i_l != 0, i_r != 0) {
        (false, false) => PauliWord::I,
        (false, true) => PauliWord::X,
        (true, false) => PauliWord::Z,
        (true, true) => PauliWord::ZX,
    }
}
