//! The bosonic dephasing channel on a truncated Fock space.
//!
//! The closed form ([`apply_dephasing`]) is the reference. Every other
//! representation here (Kraus sum, master-equation integration, dilation
//! partial trace, Gaussian phase average) is an independent route to the same
//! map and is only used to cross-check it.

mod channel;
mod dilation;
mod kraus;
mod master;
mod quadrature;

pub use channel::{apply_dephasing, compose_check, phase_rotate};
pub use dilation::{
    check_env_dim, complementary_output, default_env_dim, dilated_state, dilation_oracle,
    poisson_tail, CoherentVector, JointState, ENV_RESIDUAL_BOUND,
};
pub use kraus::{
    completeness_residual, kraus_apply, kraus_apply_adaptive, kraus_operator, KrausOutput,
    DEFAULT_KRAUS_TOLERANCE,
};
pub use master::{
    dephasing_generator, evolve_master_equation, steps_for_tolerance, MasterEquationOutput,
    RK4_STABILITY_LIMIT,
};
pub use quadrature::{default_quadrature_nodes, phase_average_oracle, GaussHermite};

use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, is_hermitian, CMatrix, C64};

/// Dephasing rate γ ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingParams {
    gamma: f64,
}

impl DephasingParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidRate(gamma));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `ε = exp(-γ/2)`, the nearest-neighbour coherent-state overlap.
    pub fn epsilon(&self) -> f64 {
        (-0.5 * self.gamma).exp()
    }

    /// Off-diagonal damping `exp(-γ k² / 2)` for `k = m - n`.
    pub fn coherence_factor(&self, k: i64) -> f64 {
        let k = k as f64;
        (-0.5 * self.gamma * k * k).exp()
    }
}

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// A density matrix in the Fock basis, `entries[(m, n)] = ρ_{m,n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    entries: CMatrix,
}

impl FockDensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let rho = Self { entries };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn from_diagonal(p: &InputDistribution) -> Self {
        let dim = p.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (i, &x) in p.probs().iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        Self { entries: m }
    }

    /// Projector onto the Fock state `|level⟩`.
    pub fn fock_state(dim: usize, level: usize) -> Self {
        Self::from_diagonal(&InputDistribution::point_mass(dim, level))
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.entries;
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "shape {:?}",
                m.shape()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        if !is_hermitian(m, HERMITIAN_TOLERANCE) {
            return Err(Error::InvalidDensityMatrix("not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let lowest = hermitian_eigenvalues(m)[0];
        if lowest < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "eigenvalue {lowest:e}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.entries[(m, n)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// Keeps the populations and drops every coherence.
    pub fn dephased_diagonal(&self) -> Self {
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.dim() {
            m[(i, i)] = C64::new(self.entries[(i, i)].re, 0.0);
        }
        Self { entries: m }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        crate::linalg::von_neumann_entropy(&self.entries)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        crate::linalg::max_abs_diff(&self.entries, &other.entries)
    }
}
