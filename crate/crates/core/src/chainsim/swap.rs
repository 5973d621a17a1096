//! The two-subnode swap gate and a brute-force state-vector oracle for the
//! swapping stage of short chains.

use num_complex::Complex64;

use super::pauli::{correction_for, BellLabel, PauliWord};
use crate::ChainError;

pub type Mat2 = [[Complex64; 2]; 2];
/// Row-major 4×4 matrix in the basis |i_L i_R⟩ = |00⟩, |01⟩, |10⟩, |11⟩.
pub type Mat4 = [[Complex64; 4]; 4];

/// Diagonal of the controlled-phase P_LR.
pub const P_LR_DIAGONAL: [f64; 4] = [-1.0, -1.0, 1.0, -1.0];

/// Corrected end-pair fidelity required by the oracle.
pub const ORACLE_FIDELITY: f64 = 1.0 - 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy)]
enum Axis {
    X,
    Y,
    Z,
}

fn sigma(axis: Axis) -> Mat2 {
    match axis {
        Axis::X => [[ZERO, ONE], [ONE, ZERO]],
        Axis::Y => [[ZERO, -I_UNIT], [I_UNIT, ZERO]],
        Axis::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// exp(−iθσ) = cos θ·I − i sin θ·σ.
fn exp_pauli(theta: f64, axis: Axis) -> Mat2 {
    let s = sigma(axis);
    let (sin, cos) = theta.sin_cos();
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            let id = if r == c { cos } else { 0.0 };
            *x = Complex64::new(id, 0.0) - I_UNIT * sin * s[r][c];
        }
    }
    out
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = (0..2).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn mul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = a[r / 2][c / 2] * b[r % 2][c % 2];
        }
    }
    out
}

/// U = exp(−iπ/2 σz)·exp(−iπ/4 σy).
pub fn u_gate() -> Mat2 {
    mul2(&exp_pauli(std::f64::consts::FRAC_PI_2, Axis::Z), &exp_pauli(std::f64::consts::FRAC_PI_4, Axis::Y))
}

/// V = exp(−iπ/2 σx)·exp(−iπ/2 σz)·exp(−iπ/4 σy).
pub fn v_gate() -> Mat2 {
    let xz = mul2(
        &exp_pauli(std::f64::consts::FRAC_PI_2, Axis::X),
        &exp_pauli(std::f64::consts::FRAC_PI_2, Axis::Z),
    );
    mul2(&xz, &exp_pauli(std::f64::consts::FRAC_PI_4, Axis::Y))
}

pub fn diagonal(d: [f64; 4]) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for (i, x) in d.into_iter().enumerate() {
        out[i][i] = Complex64::new(x, 0.0);
    }
    out
}

/// (U_L ⊗ U_R)·P_LR·(I_L ⊗ V_R).
pub fn swap_gate_matrix() -> Mat4 {
    swap_gate_matrix_with(P_LR_DIAGONAL)
}

/// The swap gate with an arbitrary diagonal in place of P_LR.
pub fn swap_gate_matrix_with(p_lr: [f64; 4]) -> Mat4 {
    let id: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
    let u = u_gate();
    let left = kron(&u, &u);
    let right = kron(&id, &v_gate());
    mul4(&mul4(&left, &diagonal(p_lr)), &right)
}

/// max |(M†M − I)_rc|.
pub fn unitarity_error(m: &Mat4) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            let v: Complex64 = (0..4).map(|k| m[k][r].conj() * m[k][c]).sum();
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

/// Result of projecting the chain onto one set of measurement outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapOracleResult {
    /// Bell state of (R₁, L_N) before correction.
    pub label: BellLabel,
    /// W = ∏ W_k.
    pub correction: PauliWord,
    /// |⟨Φ⁺|(I ⊗ W⁻¹)ψ⟩|² after correction.
    pub fidelity: f64,
    /// Born probability of the outcomes.
    pub probability: f64,
}

/// Brute-force swap: Bell pairs on every link, the swap gate on every
/// intermediate node, projection on `outcomes` (one (i_L, i_R) per node
/// 2..N−1) and correction of L_N.
pub fn swap_oracle(n_nodes: usize, outcomes: &[(u8, u8)]) -> Result<SwapOracleResult, ChainError> {
    swap_oracle_with_gate(n_nodes, outcomes, &swap_gate_matrix())
}

pub fn swap_oracle_with_gate(
    n_nodes: usize,
    outcomes: &[(u8, u8)],
    gate: &Mat4,
) -> Result<SwapOracleResult, ChainError> {
    if !(3..=6).contains(&n_nodes) {
        return Err(ChainError::OracleSize(n_nodes));
    }
    if outcomes.len() != n_nodes - 2 {
        return Err(ChainError::OutcomeCount {
            expected: n_nodes - 2,
            got: outcomes.len(),
        });
    }
    // qubit order R1, L2, R2, ..., L_{N-1}, R_{N-1}, L_N; qubit 0 is the most significant bit
    let n_qubits = 2 * (n_nodes - 1);
    let bit = |q: usize| 1usize << (n_qubits - 1 - q);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![ZERO; 1 << n_qubits];
    for idx in 0..psi.len() {
        let paired = (0..n_qubits / 2).all(|p| (idx & bit(2 * p) == 0) == (idx & bit(2 * p + 1) == 0));
        if paired {
            psi[idx] = Complex64::new(h.powi((n_nodes - 1) as i32), 0.0);
        }
    }
    for node in 0..n_nodes - 2 {
        let (ql, qr) = (bit(2 * node + 1), bit(2 * node + 2));
        for base in 0..psi.len() {
            if base & (ql | qr) != 0 {
                continue;
            }
            let idx = [base, base | qr, base | ql, base | ql | qr];
            let old = idx.map(|i| psi[i]);
            for (r, &i) in idx.iter().enumerate() {
                psi[i] = (0..4).map(|c| gate[r][c] * old[c]).sum();
            }
        }
    }
    let mut end = [ZERO; 4];
    let first = bit(0);
    let last = bit(n_qubits - 1);
    let mut fixed = 0usize;
    for (node, &(i_l, i_r)) in outcomes.iter().enumerate() {
        if i_l != 0 {
            fixed |= bit(2 * node + 1);
        }
        if i_r != 0 {
            fixed |= bit(2 * node + 2);
        }
    }
    for (e, slot) in end.iter_mut().enumerate() {
        let mut idx = fixed;
        if e & 2 != 0 {
            idx |= first;
        }
        if e & 1 != 0 {
            idx |= last;
        }
        *slot = psi[idx];
    }
    let probability: f64 = end.iter().map(|a| a.norm_sqr()).sum();
    if probability < 1e-14 {
        return Err(ChainError::ImpossibleOutcome {
            outcomes: outcomes.to_vec(),
        });
    }
    let norm = probability.sqrt();
    for a in &mut end {
        *a /= norm;
    }
    let overlap = |v: &[Complex64; 4], w: &[Complex64; 4]| -> f64 {
        v.iter().zip(w).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()
    };
    let label = BellLabel::ALL
        .into_iter()
        .max_by(|a, b| overlap(&a.vector(), &end).total_cmp(&overlap(&b.vector(), &end)))
        .expect("four labels");
    let correction = outcomes
        .iter()
        .fold(PauliWord::I, |w, &(i_l, i_r)| w.compose(correction_for(i_l, i_r)));
    // W is Hermitian up to phase, so applying W undoes it
    let w = correction.matrix();
    let mut corrected = [ZERO; 4];
    for a in 0..2 {
        for b in 0..2 {
            corrected[2 * a + b] = (0..2).map(|c| w[b][c] * end[2 * a + c]).sum();
        }
    }
    let fidelity = overlap(&BellLabel::PhiPlus.vector(), &corrected);
    if fidelity < ORACLE_FIDELITY {
        return Err(ChainError::CorrectionFailed {
            outcomes: outcomes.to_vec(),
            fidelity,
        });
    }
    Ok(SwapOracleResult {
        label,
        correction,
        fidelity,
        probability,
    })
}

/// Every outcome combination for `n_nodes`, in lexicographic order.
pub fn all_outcomes(n_nodes: usize) -> Vec<Vec<(u8, u8)>> {
    let m = n_nodes.saturating_sub(2);
    (0..1usize << (2 * m))
        .map(|code| {
            (0..m)
                .map(|node| {
                    let pair = (code >> (2 * (m - 1 - node))) & 3;
                    ((pair >> 1) as u8, (pair & 1) as u8)
                })
                .collect()
        })
        .collect()
}
