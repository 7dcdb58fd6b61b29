//! Entropy of the environment output through the replica matrix
//! `A[i][j] = exp(-γ(i-j)²/2) p_j`.
//!
//! `Tr Ωⁿ = Tr Aⁿ` for every `n`, so `A` carries the whole nonzero spectrum of
//! the coherent-state mixture `Ω = Σ p_m |√γ m⟩⟨√γ m|` while being only
//! `(N+1)×(N+1)`. `A = G·D` is not symmetric; its spectrum is read off the
//! similar matrix `D^{1/2} G D^{1/2}` on the support of `p`.

use nalgebra::DMatrix;

use crate::distribution::InputDistribution;
use crate::error::Result;
use crate::fock::{complementary_output, DephasingParams};
use crate::linalg::{spectral_entropy_bits, symmetric_eigenvalues, EIGEN_CLAMP};

/// `⟨√γ i|√γ j⟩ = exp(-γ(i-j)²/2)`.
pub fn gram_overlap(params: DephasingParams, i: usize, j: usize) -> f64 {
    params.coherence_factor(i as i64 - j as i64)
}

/// Symmetric Gram kernel `G[i][j] = exp(-γ(i-j)²/2)` on `dim` levels.
pub fn gram_matrix(params: DephasingParams, dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| gram_overlap(params, i, j))
}

#[derive(Debug, Clone)]
pub struct ReplicaMatrix {
    entries: DMatrix<f64>,
    kernel: DMatrix<f64>,
    p: InputDistribution,
}

impl ReplicaMatrix {
    pub fn new(p: &InputDistribution, params: DephasingParams) -> Self {
        Self::with_kernel(p, gram_matrix(params, p.dim()))
    }

    /// Builds `A = kernel · diag(p)` from an arbitrary kernel. Used to inject
    /// faults into the validation suites.
    pub fn with_kernel(p: &InputDistribution, kernel: DMatrix<f64>) -> Self {
        assert_eq!(kernel.nrows(), p.dim());
        let probs = p.probs();
        let entries = DMatrix::from_fn(p.dim(), p.dim(), |i, j| kernel[(i, j)] * probs[j]);
        Self {
            entries,
            kernel,
            p: p.clone(),
        }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `D^{1/2} G D^{1/2}` restricted to the support of `p`.
    pub fn symmetrized(&self) -> (Vec<usize>, DMatrix<f64>) {
        let support = self.p.support();
        let probs = self.p.probs();
        let s = DMatrix::from_fn(support.len(), support.len(), |a, b| {
            let (i, j) = (support[a], support[b]);
            (probs[i] * probs[j]).sqrt() * self.kernel[(i, j)]
        });
        (support, s)
    }

    /// All `N+1` eigenvalues in ascending order, zeros for the dropped
    /// indices, roundoff negatives clamped to 0.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (support, s) = self.symmetrized();
        let mut ev = if support.is_empty() {
            Vec::new()
        } else {
            symmetric_eigenvalues(&s)
        };
        for x in &mut ev {
            if *x < 0.0 && *x >= -EIGEN_CLAMP {
                *x = 0.0;
            }
        }
        ev.resize(self.dim(), 0.0);
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn entropy(&self) -> f64 {
        spectral_entropy_bits(self.eigenvalues())
    }
}

pub fn build_replica_matrix(p: &InputDistribution, params: DephasingParams) -> ReplicaMatrix {
    ReplicaMatrix::new(p, params)
}

/// `S(Ω)` in bits from the replica spectrum.
pub fn entropy_replica(p: &InputDistribution, params: DephasingParams) -> f64 {
    ReplicaMatrix::new(p, params).entropy()
}

/// `S(Ω)` in bits by diagonalizing `Ω` explicitly on `env_dim` levels.
pub fn entropy_bruteforce_oracle(
    p: &InputDistribution,
    params: DephasingParams,
    env_dim: usize,
) -> Result<f64> {
    Ok(complementary_output(p, params, env_dim)?.entropy())
}

/// `-Σ p log₂ p` with `0 log 0 = 0`.
pub fn shannon_entropy(p: &InputDistribution) -> f64 {
    spectral_entropy_bits(p.probs().iter().copied())
}

/// `J(diag p) = H(p) − S(Ω)`: the output of a Fock-diagonal input is the
/// input itself, so its entropy is the Shannon entropy of `p`.
pub fn coherent_information_diagonal(p: &InputDistribution, params: DephasingParams) -> f64 {
    shannon_entropy(p) - entropy_replica(p, params)
}
