use super::{DephasingParams, FockDensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

pub const DEFAULT_KRAUS_TOLERANCE: f64 = 1e-12;
const MAX_KRAUS_ORDER: usize = 100_000;

#[derive(Debug, Clone)]
pub struct KrausOutput {
    pub state: FockDensityMatrix,
    pub j_max: usize,
    pub completeness_residual: f64,
}

/// `K_j = exp(-γ n̂²/2) (-i √γ n̂)^j / √(j!)`, diagonal in the Fock basis.
pub fn kraus_operator(params: DephasingParams, dim: usize, j: usize) -> CMatrix {
    let gamma = params.gamma();
    let phase = match j % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    };
    let ln_j_fact: f64 = (1..=j).map(|i| (i as f64).ln()).sum();
    let mut k = CMatrix::zeros(dim, dim);
    for level in 0..dim {
        let x = gamma.sqrt() * level as f64;
        let magnitude = if j == 0 {
            (-0.5 * x * x).exp()
        } else if x == 0.0 {
            0.0
        } else {
            (-0.5 * x * x + j as f64 * x.ln() - 0.5 * ln_j_fact).exp()
        };
        k[(level, level)] = phase * magnitude;
    }
    k
}

/// `max_n |1 - Σ_{j≤j_max} e^{-γn²} (γn²)^j / j!|` over levels `n < dim`.
pub fn completeness_residual(params: DephasingParams, dim: usize, j_max: usize) -> f64 {
    (0..dim)
        .map(|n| {
            let lambda = params.gamma() * (n * n) as f64;
            1.0 - poisson_head(lambda, j_max)
        })
        .fold(0.0, |acc: f64, r| acc.max(r.abs()))
}

fn poisson_head(lambda: f64, j_max: usize) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    let ln_lambda = lambda.ln();
    let mut ln_term = -lambda;
    let mut sum = ln_term.exp();
    for j in 1..=j_max {
        ln_term += ln_lambda - (j as f64).ln();
        sum += ln_term.exp();
    }
    sum
}

/// `Σ_{j=0}^{j_max} K_j ρ K_j†`; fails when the truncated Kraus set is
/// incomplete by more than `tolerance`.
pub fn kraus_apply(
    rho: &FockDensityMatrix,
    params: DephasingParams,
    j_max: usize,
    tolerance: f64,
) -> Result<KrausOutput> {
    let dim = rho.dim();
    let residual = completeness_residual(params, dim, j_max);
    if residual > tolerance {
        return Err(Error::KrausTruncation {
            j_max,
            residual,
            tolerance,
        });
    }
    let mut acc = CMatrix::zeros(dim, dim);
    for j in 0..=j_max {
        let k = kraus_operator(params, dim, j);
        acc += &k * rho.entries() * k.adjoint();
    }
    Ok(KrausOutput {
        state: FockDensityMatrix::from_raw(acc),
        j_max,
        completeness_residual: residual,
    })
}

/// Grows `j_max` until the completeness residual drops below `tolerance`.
pub fn kraus_apply_adaptive(
    rho: &FockDensityMatrix,
    params: DephasingParams,
    tolerance: f64,
) -> Result<KrausOutput> {
    let dim = rho.dim();
    let mut j_max = 0;
    while completeness_residual(params, dim, j_max) > tolerance {
        j_max += 1;
        if j_max > MAX_KRAUS_ORDER {
            return Err(Error::KrausTruncation {
                j_max,
                residual: completeness_residual(params, dim, j_max),
                tolerance,
            });
        }
    }
    kraus_apply(rho, params, j_max, tolerance)
}
