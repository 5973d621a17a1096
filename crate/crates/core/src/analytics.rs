//! Closed-form success probabilities, round-count statistics and protocol
//! times. These are the reference values the Monte Carlo layers are checked
//! against.
//!
//! Round counts follow the order statistics of K i.i.d. geometric variables
//! with success probability P₀: the cumulative distribution of the maximum is
//! S_K(n) = [1 − (1 − P₀)ⁿ]^K and its mass function is p_K(n) = S_K(n) − S_K(n − 1).
//! Powers (1 − P₀)ⁿ are evaluated as exp(n·ln(1 − P₀)) so that they stay
//! accurate for n in the thousands.

use std::f64::consts::PI;

use crate::error::ParamError;
use crate::params::{ChainParams, NoiseParams};

/// Number of Rydberg-involving π pulses per link attempt (generation and
/// diagnosis) in the reference budget.
pub const DEFAULT_N_R: u32 = 23;

/// Number of ion detections per link diagnosis.
pub const DIAGNOSIS_DETECTIONS: i32 = 4;

/// Relative weight below which a series term no longer contributes.
const TERM_TOLERANCE: f64 = 1e-15;
/// Upper bound required on the neglected tail of the round-count series.
const TAIL_TOLERANCE: f64 = 1e-9;

/// Per-link success budget P₀ = η_t × (1 − n_r·πΓ/Ω) × η_ion⁴.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub eta_t: f64,
    pub p_no_decay: f64,
    pub p_ion4: f64,
    pub p0: f64,
    pub n_r: u32,
}

/// Expected synchronized rounds to entangle every link of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundCountSummary {
    /// n̄ = 2 Σ n·p_K(n).
    pub n_bar: f64,
    /// Approximate peak of p_K, −ln K / ln(1 − P₀).
    pub n_max: f64,
    /// Links per phase.
    pub k: usize,
    /// Last series index included.
    pub truncation_n: u64,
    /// Upper bound on the part of n̄ not summed.
    pub tail_bound: f64,
}

/// Fiber transmission probability exp(−L₀/L_att).
pub fn eta_t(l0_km: f64, l_att_km: f64) -> Result<f64, ParamError> {
    if !(l_att_km > 0.0) {
        return Err(ParamError::invalid("l_att_km", l_att_km, "must be positive"));
    }
    if !(l0_km >= 0.0) || l0_km.is_infinite() {
        return Err(ParamError::invalid("l0_km", l0_km, "must be finite and nonnegative"));
    }
    Ok((-l0_km / l_att_km).exp())
}

fn unit_factor(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ParamError::FactorOutOfRange { name, value })
    }
}

/// Link budget with the reference pulse count n_r = 23.
pub fn p0(noise: &NoiseParams) -> Result<LinkBudget, ParamError> {
    p0_with_pulses(noise, DEFAULT_N_R)
}

pub fn p0_with_pulses(noise: &NoiseParams, n_r: u32) -> Result<LinkBudget, ParamError> {
    noise.validate()?;
    let eta_t = eta_t(noise.l0_km, noise.l_att_km)?;
    let p_no_decay = unit_factor("1 - n_r*pi*gamma/omega", 1.0 - f64::from(n_r) * noise.decay_per_pulse())?;
    let p_ion4 = unit_factor("eta_ion^4", noise.eta_ion.powi(DIAGNOSIS_DETECTIONS))?;
    Ok(LinkBudget {
        eta_t,
        p_no_decay,
        p_ion4,
        p0: eta_t * p_no_decay * p_ion4,
        n_r,
    })
}

/// Success probability of one intermediate node's swap: (1 − 4πΓ/Ω)·η_ion⁴.
pub fn swap_node_success(noise: &NoiseParams) -> Result<f64, ParamError> {
    noise.validate()?;
    unit_factor(
        "(1 - 4*pi*gamma/omega)*eta_ion^4",
        (1.0 - 4.0 * PI * noise.gamma / noise.omega) * noise.eta_ion.powi(DIAGNOSIS_DETECTIONS),
    )
}

/// Swapping success for the whole chain, P₁(N) = [(1 − 4πΓ/Ω)·η_ion⁴]^(N−2).
pub fn p1(n_nodes: usize, noise: &NoiseParams) -> Result<f64, ParamError> {
    if n_nodes < 2 {
        return Err(ParamError::invalid("n_nodes", n_nodes as f64, "must be at least 2"));
    }
    Ok(swap_node_success(noise)?.powi((n_nodes - 2) as i32))
}

/// ln(1 − P₀), with −∞ for P₀ = 1.
fn log_fail(p0: f64) -> f64 {
    (-p0).ln_1p()
}

/// (1 − P₀)ⁿ.
fn fail_pow(p0: f64, n: u64) -> f64 {
    if n == 0 {
        1.0
    } else {
        (n as f64 * log_fail(p0)).exp()
    }
}

/// ln S_K(n).
fn ln_cdf(n: u64, k: usize, p0: f64) -> f64 {
    k as f64 * (-fail_pow(p0, n)).ln_1p()
}

/// Probability that all of K geometric(P₀) trials have succeeded within n rounds.
pub fn s_k(n: u64, k: usize, p0: f64) -> f64 {
    ln_cdf(n, k, p0).exp()
}

/// Probability that the slowest of K links succeeds in exactly round n.
pub fn p_k(n: u64, k: usize, p0: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let upper = ln_cdf(n, k, p0);
    let lower = ln_cdf(n - 1, k, p0);
    // S(n) − S(n−1) = S(n)·(1 − exp(ln S(n−1) − ln S(n)))
    upper.exp() * -(lower - upper).exp_m1()
}

/// Expected total rounds over two phases of K = ⌊N/2⌋ links each.
///
/// For N = 2 there is a single link, yet the series is still doubled; this
/// keeps the two-phase accounting uniform across N.
pub fn n_bar(p0: f64, n_nodes: usize) -> Result<RoundCountSummary, ParamError> {
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(ParamError::invalid("p0", p0, "must lie in (0, 1]"));
    }
    if n_nodes < 2 {
        return Err(ParamError::invalid("n_nodes", n_nodes as f64, "must be at least 2"));
    }
    let k = (n_nodes / 2).max(1);
    let n_max = peak_round(k, p0);
    let mut sum = 0.0;
    let mut n: u64 = 0;
    loop {
        n += 1;
        let term = n as f64 * p_k(n, k, p0);
        sum += term;
        // Σ_{m>n} m·p_K(m) ≤ K·qⁿ·(n + 1/P₀) from P(max > j) ≤ K·q^j
        let tail = 2.0 * k as f64 * fail_pow(p0, n) * (n as f64 + 1.0 / p0);
        if (n as f64) >= n_max && term <= TERM_TOLERANCE * sum && tail < TAIL_TOLERANCE {
            return Ok(RoundCountSummary {
                n_bar: 2.0 * sum,
                n_max,
                k,
                truncation_n: n,
                tail_bound: tail,
            });
        }
    }
}

/// n_K^max = −ln K / ln(1 − P₀); zero when K = 1 or P₀ = 1.
pub fn peak_round(k: usize, p0: f64) -> f64 {
    let v = -(k as f64).ln() / log_fail(p0);
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// P₀ the chain runs with: the override if set, else the link budget.
pub fn chain_p0(params: &ChainParams) -> Result<f64, ParamError> {
    match params.p0_override {
        Some(p) => Ok(p),
        None => Ok(p0(&params.noise)?.p0),
    }
}

/// Average end-to-end time T ≈ (L₀/c) · n̄(P₀, N) / P₁(N).
pub fn total_time(params: &ChainParams) -> Result<f64, ParamError> {
    params.validate()?;
    let p0 = chain_p0(params)?;
    let rounds = n_bar(p0, params.n_nodes)?;
    let p1 = p1(params.n_nodes, &params.noise)?;
    Ok(params.noise.segment_time() * rounds.n_bar / p1)
}

/// Average time for direct transmission over L with a lossy fiber,
/// (1/χ_r)·exp(L/L_att).
pub fn direct_time(l_total_km: f64, l_att_km: f64, chi_r: f64) -> Result<f64, ParamError> {
    if !(chi_r > 0.0) {
        return Err(ParamError::invalid("chi_r", chi_r, "must be positive"));
    }
    Ok(1.0 / (chi_r * eta_t(l_total_km, l_att_km)?))
}

/// log₁₀ of average entangling time against total distance L.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Series {
    pub direct: Vec<(f64, f64)>,
    pub protocol: Vec<(f64, f64)>,
}

/// Time-versus-distance curves for direct transmission and the repeater,
/// splitting L over N − 1 segments (L₀ = L/(N − 1)). Any P₀ override in
/// `params` is ignored since P₀ depends on L₀ here.
pub fn fig3_series(n_nodes: usize, l_grid: &[f64], params: &ChainParams) -> Result<Fig3Series, ParamError> {
    let mut direct = Vec::with_capacity(l_grid.len());
    let mut protocol = Vec::with_capacity(l_grid.len());
    for &l in l_grid {
        if !(l > 0.0) {
            return Err(ParamError::invalid("L", l, "grid distances must be positive"));
        }
        let mut chain = ChainParams {
            n_nodes,
            p0_override: None,
            ..*params
        };
        chain.noise.l0_km = l / (n_nodes - 1).max(1) as f64;
        direct.push((l, direct_time(l, params.noise.l_att_km, params.chi_r)?.log10()));
        protocol.push((l, total_time(&chain)?.log10()));
    }
    Ok(Fig3Series { direct, protocol })
}

/// p_K(n) for n = 1 until the remaining mass drops below 1e-9.
pub fn fig_a1_series(k: usize, p0: f64) -> Vec<(u64, f64)> {
    let mut out = Vec::new();
    let mut n = 1;
    loop {
        out.push((n, p_k(n, k, p0)));
        if 1.0 - s_k(n, k, p0) < TAIL_TOLERANCE {
            return out;
        }
        n += 1;
    }
}

/// (N, n̄(P₀, N), 2·n_{N/2}^max) for each N.
pub fn fig_a2_series(p0: f64, nodes: &[usize]) -> Result<Vec<(usize, f64, f64)>, ParamError> {
    nodes
        .iter()
        .map(|&n| {
            let s = n_bar(p0, n)?;
            Ok((n, s.n_bar, 2.0 * s.n_max))
        })
        .collect()
}
