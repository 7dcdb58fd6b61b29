//! Cross-checks between independent routes to the same quantities, run by the
//! `validate` subcommand.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distribution::InputDistribution;
use crate::error::Result;
use crate::fock::{
    apply_dephasing, compose_check, default_env_dim, default_quadrature_nodes, dilation_oracle,
    evolve_master_equation, kraus_apply_adaptive, phase_average_oracle, phase_rotate,
    steps_for_tolerance, DephasingParams, FockDensityMatrix, DEFAULT_KRAUS_TOLERANCE,
};
use crate::linalg::{random_density_matrix, random_simplex_point};
use crate::replica::{
    coherent_information_diagonal, entropy_bruteforce_oracle, gram_matrix, ReplicaMatrix,
};

pub const REPRESENTATION_TOLERANCE: f64 = 1e-8;
pub const REPLICA_TOLERANCE: f64 = 1e-8;
pub const SEMIGROUP_TOLERANCE: f64 = 1e-14;
pub const COVARIANCE_TOLERANCE: f64 = 1e-14;
pub const DOMINANCE_SLACK: f64 = 1e-9;

const MASTER_TOLERANCE: f64 = 1e-10;
const GAMMAS: [f64; 3] = [0.25, 1.0, 2.0];
const DOMINANCE_GAMMAS: [f64; 2] = [0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValidationLevel {
    #[default]
    Quick,
    Full,
}

impl ValidationLevel {
    fn max_n(self) -> usize {
        match self {
            Self::Quick => 3,
            Self::Full => 5,
        }
    }

    fn samples(self, full: usize) -> usize {
        match self {
            Self::Quick => full.div_ceil(10).max(2),
            Self::Full => full,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationOptions {
    pub level: ValidationLevel,
    pub seed: u64,
    /// Negative control: scales the off-diagonal Gram entries by 0.9 in the
    /// replica suite, which must then fail.
    pub corrupt_gram_kernel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub errors: Vec<String>,
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    checks: usize,
    max_deviation: f64,
    errors: Vec<String>,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            checks: 0,
            max_deviation: 0.0,
            errors: Vec::new(),
        }
    }

    fn record(&mut self, deviation: f64) {
        self.checks += 1;
        if deviation.is_nan() || deviation > self.max_deviation {
            self.max_deviation = deviation;
        }
    }

    fn record_result(&mut self, context: &str, r: Result<f64>) {
        match r {
            Ok(d) => self.record(d),
            Err(e) => {
                self.checks += 1;
                self.errors.push(format!("{context}: {e}"));
            }
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name,
            passed: self.errors.is_empty() && self.max_deviation <= self.tolerance,
            checks: self.checks,
            max_deviation: self.max_deviation,
            tolerance: self.tolerance,
            errors: self.errors,
        }
    }
}

fn rng_for(seed: u64, suite: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(suite);
    rng
}

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> FockDensityMatrix {
    FockDensityMatrix::new(random_density_matrix(dim, rng)).expect("Ginibre states are valid")
}

fn params(gamma: f64) -> DephasingParams {
    DephasingParams::new(gamma).expect("suite rates are valid")
}

/// The five channel routes on one state, compared pairwise.
pub fn representation_spread(rho: &FockDensityMatrix, p: DephasingParams) -> Result<f64> {
    let max_level = rho.dim() - 1;
    let closed = apply_dephasing(rho, p);
    let kraus = kraus_apply_adaptive(rho, p, DEFAULT_KRAUS_TOLERANCE)?.state;
    let steps = steps_for_tolerance(p.gamma(), rho.dim(), MASTER_TOLERANCE);
    let master = evolve_master_equation(rho, p.gamma(), steps)?.state;
    let (dilation, _) = dilation_oracle(rho, p, default_env_dim(p, max_level))?;
    let quadrature = phase_average_oracle(rho, p, default_quadrature_nodes(p, max_level))?;
    let routes = [closed, kraus, master, dilation, quadrature];
    let mut worst: f64 = 0.0;
    for (i, a) in routes.iter().enumerate() {
        for b in &routes[i + 1..] {
            worst = worst.max(a.max_abs_diff(b));
        }
    }
    Ok(worst)
}

pub fn representation_suite(options: &ValidationOptions) -> SuiteReport {
    let mut tally = Tally::new("representation-equivalence", REPRESENTATION_TOLERANCE);
    let mut rng = rng_for(options.seed, 1);
    let states = options.level.samples(20);
    for n in 1..=options.level.max_n() {
        for gamma in GAMMAS {
            for s in 0..states {
                let rho = random_state(n + 1, &mut rng);
                tally.record_result(
                    &format!("N={n} gamma={gamma} state {s}"),
                    representation_spread(&rho, params(gamma)),
                );
            }
        }
    }
    tally.finish()
}

pub fn replica_suite(options: &ValidationOptions) -> SuiteReport {
    let mut tally = Tally::new("replica-vs-bruteforce", REPLICA_TOLERANCE);
    let mut rng = rng_for(options.seed, 2);
    let draws = options.level.samples(50);
    for n in 1..=options.level.max_n() {
        for gamma in GAMMAS {
            let p = params(gamma);
            let mut kernel = gram_matrix(p, n + 1);
            if options.corrupt_gram_kernel {
                for i in 0..=n {
                    for j in 0..=n {
                        if i != j {
                            kernel[(i, j)] *= 0.9;
                        }
                    }
                }
            }
            let env_dim = default_env_dim(p, n);
            for _ in 0..draws {
                let dist = InputDistribution::new(random_simplex_point(n + 1, &mut rng))
                    .expect("simplex draws are valid");
                let replica = ReplicaMatrix::with_kernel(&dist, kernel.clone()).entropy();
                tally.record_result(
                    &format!("N={n} gamma={gamma}"),
                    entropy_bruteforce_oracle(&dist, p, env_dim).map(|b| (b - replica).abs()),
                );
            }
        }
    }
    tally.finish()
}

pub fn semigroup_suite(options: &ValidationOptions) -> SuiteReport {
    let mut tally = Tally::new("semigroup", SEMIGROUP_TOLERANCE);
    let mut rng = rng_for(options.seed, 3);
    for n in 1..=options.level.max_n() {
        for _ in 0..options.level.samples(20) {
            let rho = random_state(n + 1, &mut rng);
            let g1 = rng.random_range(0.0..3.0);
            let g2 = rng.random_range(0.0..3.0);
            tally.record_result(
                &format!("N={n} gammas=({g1}, {g2})"),
                compose_check(g1, g2, &rho).map(|(seq, comb)| seq.max_abs_diff(&comb)),
            );
        }
    }
    tally.finish()
}

pub fn covariance_suite(options: &ValidationOptions) -> SuiteReport {
    let mut tally = Tally::new("phase-covariance", COVARIANCE_TOLERANCE);
    let mut rng = rng_for(options.seed, 4);
    for n in 1..=options.level.max_n() {
        for gamma in GAMMAS {
            let p = params(gamma);
            for _ in 0..options.level.samples(20) {
                let rho = random_state(n + 1, &mut rng);
                let theta = rng.random_range(0.0..2.0 * PI);
                let lhs = apply_dephasing(&phase_rotate(&rho, theta), p);
                let rhs = phase_rotate(&apply_dephasing(&rho, p), theta);
                tally.record(lhs.max_abs_diff(&rhs));
            }
        }
    }
    tally.finish()
}

/// `J(ρ) − J(diag ρ)`, with `J(ρ)` from the two marginals of the dilation.
pub fn dominance_excess(rho: &FockDensityMatrix, p: DephasingParams) -> Result<f64> {
    let env_dim = default_env_dim(p, rho.dim() - 1);
    let (sys, env) = dilation_oracle(rho, p, env_dim)?;
    let j_rho = sys.entropy() - env.entropy();
    let diag = InputDistribution::from_weights(&rho.diagonal())?;
    Ok(j_rho - coherent_information_diagonal(&diag, p))
}

pub fn dominance_suite(options: &ValidationOptions) -> SuiteReport {
    let mut tally = Tally::new("diagonal-dominance", DOMINANCE_SLACK);
    let mut rng = rng_for(options.seed, 5);
    let max_n = options.level.max_n().min(4);
    let per_point = options
        .level
        .samples(100)
        .div_ceil(max_n * DOMINANCE_GAMMAS.len());
    for n in 1..=max_n {
        for gamma in DOMINANCE_GAMMAS {
            for _ in 0..per_point {
                let rho = random_state(n + 1, &mut rng);
                // only the positive part counts against the bound
                tally.record_result(
                    &format!("N={n} gamma={gamma}"),
                    dominance_excess(&rho, params(gamma)).map(|d| d.max(0.0)),
                );
            }
        }
    }
    tally.finish()
}

pub fn run_validation(options: &ValidationOptions) -> Vec<SuiteReport> {
    vec![
        representation_suite(options),
        replica_suite(options),
        semigroup_suite(options),
        covariance_suite(options),
        dominance_suite(options),
    ]
}
