//! Discrete Gaussian input distributions centred at `N/2`.

use super::objective::coherent_information_raw;
use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::fock::DephasingParams;

/// Lower end of the width bracket searched by [`maximize_over_ansatz`]; the
/// upper end is `5N`.
pub const SIGMA_BRACKET_LOW: f64 = 0.05;
const GOLDEN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteGaussianAnsatz {
    mu: f64,
    sigma: f64,
    n: usize,
}

impl DiscreteGaussianAnsatz {
    pub fn new(n: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            mu: n as f64 / 2.0,
            sigma,
            n,
        })
    }

    /// Width `σ = 0.2N + 0.6`.
    pub fn default_for(n: usize) -> Self {
        Self::new(n, 0.2 * n as f64 + 0.6).expect("positive width")
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `p_m ∝ exp(−(m−μ)²/(2σ²))` on `0..=N`.
pub fn ansatz_distribution(ansatz: &DiscreteGaussianAnsatz) -> InputDistribution {
    let d2: Vec<f64> = (0..=ansatz.n)
        .map(|m| (m as f64 - ansatz.mu).powi(2))
        .collect();
    // shift by the smallest distance so the peak weight is exactly 1
    let floor = d2.iter().copied().fold(f64::INFINITY, f64::min);
    let two_s2 = 2.0 * ansatz.sigma * ansatz.sigma;
    let w: Vec<f64> = d2.iter().map(|d| (-(d - floor) / two_s2).exp()).collect();
    let total: f64 = w.iter().sum();
    InputDistribution::from_raw(w.into_iter().map(|x| x / total).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzFit {
    pub sigma: f64,
    pub q_bits: f64,
    pub distribution: InputDistribution,
}

/// Golden-section search for the width maximizing `J` over `[0.05, 5N]`.
pub fn maximize_over_ansatz(n: usize, params: DephasingParams) -> Result<AnsatzFit> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let objective = |sigma: f64| -> Result<f64> {
        let d = ansatz_distribution(&DiscreteGaussianAnsatz::new(n, sigma)?);
        let v = coherent_information_raw(d.probs(), params);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Bracket(format!(
                "objective not finite at sigma={sigma}"
            )))
        }
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (SIGMA_BRACKET_LOW, 5.0 * n as f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c)?, objective(d)?);
    while b - a > GOLDEN_TOLERANCE * (1.0 + a.abs()) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
    }
    let sigma = 0.5 * (a + b);
    let distribution = ansatz_distribution(&DiscreteGaussianAnsatz::new(n, sigma)?);
    Ok(AnsatzFit {
        sigma,
        q_bits: objective(sigma)?.max(0.0),
        distribution,
    })
}
