//! Quantum capacity of the bosonic dephasing channel on energy-truncated Fock
//! spaces.
//!
//! The channel multiplies the Fock-basis matrix element `ρ[m][n]` by
//! `exp(-γ (m-n)² / 2)`. Its capacity is the maximum over Fock-diagonal inputs
//! `p` of the coherent information `H(p) - S(Ω)`, where `Ω = Σ p_m |√γ m⟩⟨√γ m|`
//! is a mixture of coherent states. The entropy of `Ω` is obtained from the
//! `(N+1)×(N+1)` replica matrix `A = G·diag(p)` instead of the coherent states
//! themselves.
//!
//! Module map:
//! - [`fock`]: the channel in closed form, Kraus form, as a master-equation
//!   solution, through its dilation, and as a phase average.
//! - [`replica`]: Gram kernel, replica matrix and the entropies built on it.
//! - [`capacity`]: simplex optimizer, lower bounds, discrete-Gaussian ansatz,
//!   large-γ expansion and parameter sweeps.
//! - [`io`]: sweep configuration and bit-stable CSV/JSON tables.
//! - [`validation`]: oracle cross-checks used by the `validate` command.

pub mod capacity;
pub mod distribution;
pub mod error;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod replica;
pub mod validation;

pub use capacity::{
    asymptotic_capacity, capacity_sweep, maximize_coherent_information, maximize_over_ansatz,
    objective_gradient, two_point_lower_bound, CapacityResult, DiscreteGaussianAnsatz,
    GradientMode, OptimizerConfig, TwoPointBound,
};
pub use distribution::InputDistribution;
pub use error::{Error, Result};
pub use fock::{DephasingParams, FockDensityMatrix};
pub use replica::{
    coherent_information_diagonal, entropy_bruteforce_oracle, entropy_replica, shannon_entropy,
    ReplicaMatrix,
};
