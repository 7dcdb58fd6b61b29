use std::f64::consts::LN_2;

use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::fock::DephasingParams;

/// `H₂(q) = −q log₂ q − (1−q) log₂(1−q)`.
pub fn binary_entropy(q: f64) -> f64 {
    crate::linalg::spectral_entropy_bits([q, 1.0 - q])
}

/// Coherent information of the equal mixture of `|n⟩` and `|n+j⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointBound {
    pub gamma: f64,
    pub j: usize,
    pub q_plus: f64,
    pub q_minus: f64,
    pub value_bits: f64,
}

/// `1 − H₂(q₊, q₋)` with `q± = (1 ± e^{−γj²/2})/2`, independent of the base
/// level `n`.
pub fn two_point_lower_bound(params: DephasingParams, j: usize) -> Result<TwoPointBound> {
    if j == 0 {
        return Err(Error::InvalidArgument("j must be at least 1".into()));
    }
    let overlap = params.coherence_factor(j as i64);
    let q_plus = 0.5 * (1.0 + overlap);
    let q_minus = 0.5 * (1.0 - overlap);
    let h = crate::linalg::spectral_entropy_bits([q_plus, q_minus]);
    Ok(TwoPointBound {
        gamma: params.gamma(),
        j,
        q_plus,
        q_minus,
        value_bits: 1.0 - h,
    })
}

/// True when `e^{−γ/2} < 0.1`, where the leading-order expansion is reliable.
pub fn is_asymptotic_regime(params: DephasingParams) -> bool {
    params.epsilon() < 0.1
}

const DEGENERATE_RELATIVE_GAP: f64 = 1e-8;

/// Leading large-γ term
/// `e^{−γ} Σ_m p_m p_{m+1} / (p_m − p_{m+1}) · log₂(p_m / p_{m+1})`.
pub fn asymptotic_capacity(p: &InputDistribution, params: DephasingParams) -> f64 {
    let probs = p.probs();
    let sum: f64 = probs
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if a == 0.0 || b == 0.0 {
                0.0
            } else if (a - b).abs() < DEGENERATE_RELATIVE_GAP * a.max(b) {
                // removable singularity: the limit a → b of the term
                a / LN_2
            } else {
                a * b / (a - b) * (a / b).log2()
            }
        })
        .sum();
    (-params.gamma()).exp() * sum
}
