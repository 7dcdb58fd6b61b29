//! `J(p) = H(p) − S(A(p))` and its gradient on the probability simplex.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, SymmetricEigen};

use super::GradientMode;
use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::fock::DephasingParams;
use crate::linalg::spectral_entropy_bits;
use crate::replica::gram_overlap;

/// Central-difference step of the finite-difference gradient.
pub const FD_STEP: f64 = 1e-6;

fn support_of(p: &[f64]) -> Vec<usize> {
    (0..p.len()).filter(|&i| p[i] > 0.0).collect()
}

/// `D^{1/2} G D^{1/2}` over `support`.
fn symmetrized(p: &[f64], support: &[usize], params: DephasingParams) -> DMatrix<f64> {
    DMatrix::from_fn(support.len(), support.len(), |a, b| {
        let (i, j) = (support[a], support[b]);
        (p[i] * p[j]).sqrt() * gram_overlap(params, i, j)
    })
}

/// Coherent information in bits of an (unvalidated) weight vector.
pub fn coherent_information_raw(p: &[f64], params: DephasingParams) -> f64 {
    let support = support_of(p);
    let shannon = spectral_entropy_bits(support.iter().map(|&i| p[i]));
    let m = symmetrized(p, &support, params);
    let replica = spectral_entropy_bits(m.symmetric_eigenvalues().iter().copied());
    shannon - replica
}

/// Partial derivatives of `J` in bits over `support`:
/// `∂J/∂p_k = −log₂ p_k + Σ_i U_ki² λ_i ln λ_i / (p_k ln 2)`
/// with `(λ, U)` the eigenpairs of `D^{1/2} G D^{1/2}`.
fn analytic_partials(p: &[f64], support: &[usize], params: DephasingParams) -> Vec<f64> {
    let eig = SymmetricEigen::new(symmetrized(p, support, params));
    let lam_ln_lam: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > 0.0 { l * l.ln() } else { 0.0 })
        .collect();
    support
        .iter()
        .enumerate()
        .map(|(a, &k)| {
            let s: f64 = (0..support.len())
                .map(|i| eig.eigenvectors[(a, i)].powi(2) * lam_ln_lam[i])
                .sum();
            -p[k].log2() + s / (p[k] * LN_2)
        })
        .collect()
}

fn centered(mut g: Vec<f64>) -> Vec<f64> {
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    for x in &mut g {
        *x -= mean;
    }
    g
}

/// Tangent-projected gradient of `J` over the indices in `support`.
pub(crate) fn support_gradient(
    p: &[f64],
    support: &[usize],
    params: DephasingParams,
    mode: GradientMode,
) -> Result<Vec<f64>> {
    let g = match mode {
        GradientMode::Analytic => centered(analytic_partials(p, support, params)),
        GradientMode::FiniteDifference => {
            let shift = FD_STEP / support.len() as f64;
            let mut plus = p.to_vec();
            let mut minus = p.to_vec();
            let mut g = Vec::with_capacity(support.len());
            for &k in support {
                // direction e_k − 𝟙/|support| keeps Σp fixed
                for &i in support {
                    plus[i] = p[i] - shift;
                    minus[i] = p[i] + shift;
                }
                plus[k] += FD_STEP;
                minus[k] -= FD_STEP;
                if let Some(&i) = support.iter().find(|&&i| plus[i] <= 0.0 || minus[i] <= 0.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "p[{i}] = {} too close to the boundary for finite differences",
                        p[i]
                    )));
                }
                let d = coherent_information_raw(&plus, params)
                    - coherent_information_raw(&minus, params);
                g.push(d / (2.0 * FD_STEP));
            }
            g
        }
    };
    if let Some(a) = g.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteGradient { index: support[a] });
    }
    Ok(g)
}

/// Gradient of `J(p) = H(p) − S(A(p))` (bits) projected onto the simplex
/// tangent space, so its components sum to zero. `p` must be strictly
/// positive.
pub fn objective_gradient(
    p: &InputDistribution,
    params: DephasingParams,
    mode: GradientMode,
) -> Result<Vec<f64>> {
    let probs = p.probs();
    if let Some(i) = probs.iter().position(|&x| x <= 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "gradient needs an interior point, p[{i}] = {}",
            probs[i]
        )));
    }
    let support: Vec<usize> = (0..probs.len()).collect();
    support_gradient(probs, &support, params, mode)
}
