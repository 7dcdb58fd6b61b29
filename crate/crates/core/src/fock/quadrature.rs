use super::{phase_rotate, DephasingParams, FockDensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss–Hermite rule for `∫ f(x) e^{-x²} dx`, built by Golub–Welsch.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "quadrature order must be positive".into(),
            ));
        }
        let jacobi = DMatrix::from_fn(order, order, |i, j| {
            if i.abs_diff(j) == 1 {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(jacobi);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = (0..order)
            .map(|k| {
                let v0 = eig.eigenvectors[(0, k)];
                (eig.eigenvalues[k], sqrt_pi * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Node count that resolves the fastest phase `N·√(2γ)` of a `max_level`
/// state; the rule aliases when nodes are sparser than the oscillation.
pub fn default_quadrature_nodes(params: DephasingParams, max_level: usize) -> usize {
    let n2 = (max_level * max_level) as f64;
    ((0.8 * params.gamma() * n2).ceil() as usize).max(64)
}

/// Averages `U_φ ρ U_φ†` over a centred Gaussian phase of variance γ with a
/// Gauss–Hermite rule of `nodes` points.
pub fn phase_average_oracle(
    rho: &FockDensityMatrix,
    params: DephasingParams,
    nodes: usize,
) -> Result<FockDensityMatrix> {
    if nodes == 0 {
        return Err(Error::InvalidArgument("nodes must be positive".into()));
    }
    if params.gamma() == 0.0 {
        return Ok(rho.clone());
    }
    let rule = GaussHermite::new(nodes)?;
    // φ = √(2γ) x maps the N(0, γ) density onto the weight e^{-x²}/√π
    let scale = (2.0 * params.gamma()).sqrt();
    let norm = 1.0 / std::f64::consts::PI.sqrt();
    let d = rho.dim();
    let mut acc = CMatrix::zeros(d, d);
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc += phase_rotate(rho, scale * x).entries() * nalgebra::Complex::new(w * norm, 0.0);
    }
    // populations are φ-independent; keep them bit-exact
    for i in 0..d {
        acc[(i, i)] = rho.get(i, i);
    }
    Ok(FockDensityMatrix::from_raw(acc))
}
