//! Maximization of the coherent information over Fock-diagonal inputs, plus
//! the closed-form bounds and approximations around it.

mod ansatz;
mod bounds;
mod objective;
mod optimizer;
mod sweep;

pub use ansatz::{
    ansatz_distribution, maximize_over_ansatz, AnsatzFit, DiscreteGaussianAnsatz, SIGMA_BRACKET_LOW,
};
pub use bounds::{
    asymptotic_capacity, binary_entropy, is_asymptotic_regime, two_point_lower_bound, TwoPointBound,
};
pub use objective::{coherent_information_raw, objective_gradient, FD_STEP};
pub use optimizer::{
    maximize_coherent_information, CapacityResult, GradientMode, OptimizerConfig, FREEZE_THRESHOLD,
    GRADIENT_RESIDUAL_TOLERANCE,
};
pub use sweep::{capacity_sweep, point_seed, SweepPoint};
