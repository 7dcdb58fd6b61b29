//! Exponentiated-gradient (entropic mirror) ascent on the simplex.
//!
//! Multiplicative updates keep every weight positive and the total at one, so
//! no projection step is needed. `J` is concave here, which makes any local
//! maximum global in value; restarts only guard against stagnation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ansatz::{ansatz_distribution, DiscreteGaussianAnsatz};
use super::objective::{coherent_information_raw, support_gradient};
use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::fock::DephasingParams;

/// Norm of the projected gradient below which a run counts as converged.
pub const GRADIENT_RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Weights below this are set to zero and leave the support for the run.
pub const FREEZE_THRESHOLD: f64 = 1e-14;

const ARMIJO: f64 = 1e-4;
const MAX_STEP: f64 = 1e6;
const MAX_HALVINGS: usize = 80;
const POLISH_SLACK: f64 = 1e-15;
/// Iteration continues past convergence until the gradient reaches this.
const POLISH_TARGET: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    #[default]
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub objective_tolerance: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub gradient_mode: GradientMode,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            objective_tolerance: 1e-10,
            max_iterations: 20_000,
            restarts: 3,
            gradient_mode: GradientMode::Analytic,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.objective_tolerance > 0.0 && self.objective_tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "objective_tolerance must be positive, got {}",
                self.objective_tolerance
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Optimum of the truncated problem at one `(γ, N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub gamma: f64,
    pub n: usize,
    pub q_bits: f64,
    pub p_opt: InputDistribution,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_residual: f64,
}

struct Run {
    p: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
    residual: f64,
}

fn norm(g: &[f64]) -> f64 {
    g.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn mirror_step(p: &[f64], support: &[usize], g: &[f64], g_max: f64, step: f64) -> Vec<f64> {
    let mut cand = vec![0.0; p.len()];
    for (&k, x) in support.iter().zip(g) {
        cand[k] = p[k] * (step * (x - g_max)).exp();
    }
    let total: f64 = cand.iter().sum();
    for x in &mut cand {
        *x /= total;
        if *x < FREEZE_THRESHOLD {
            *x = 0.0;
        }
    }
    let total: f64 = cand.iter().sum();
    cand.iter_mut().for_each(|x| *x /= total);
    cand
}

/// Near the maximum `J` is flat below roundoff while the gradient is still
/// resolvable. Accepts a step that keeps `J` within roundoff of `value` and at
/// least halves the projected gradient.
fn polish(
    p: &[f64],
    support: &[usize],
    g: &[f64],
    value: f64,
    params: DephasingParams,
    config: &OptimizerConfig,
) -> Result<Option<(Vec<f64>, f64)>> {
    let g_norm = norm(g);
    let g_max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = value - POLISH_SLACK * value.abs().max(1.0);
    let mut step = MAX_STEP;
    for _ in 0..MAX_HALVINGS {
        let cand = mirror_step(p, support, g, g_max, step);
        let v = coherent_information_raw(&cand, params);
        if v.is_finite() && v >= floor {
            let cand_support: Vec<usize> = (0..cand.len()).filter(|&i| cand[i] > 0.0).collect();
            if cand_support == support {
                let cg = support_gradient(&cand, &cand_support, params, config.gradient_mode)?;
                if norm(&cg) <= 0.5 * g_norm {
                    return Ok(Some((cand, v.max(value))));
                }
            }
        }
        step *= 0.5;
    }
    Ok(None)
}

fn ascend(start: Vec<f64>, params: DephasingParams, config: &OptimizerConfig) -> Result<Run> {
    let mut p = start;
    let mut value = coherent_information_raw(&p, params);
    if !value.is_finite() {
        return Err(Error::InvalidArgument(
            "objective is not finite at the start point".into(),
        ));
    }
    // Newton step for the H(p) part in the entropic geometry
    let mut step = std::f64::consts::LN_2;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
        if support.len() <= 1 {
            converged = true;
            break;
        }
        let g = support_gradient(&p, &support, params, config.gradient_mode)?;
        let g_norm = norm(&g);
        if g_norm < GRADIENT_RESIDUAL_TOLERANCE {
            converged = true;
        }
        if g_norm < POLISH_TARGET {
            break;
        }
        let g_max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let g_mean: f64 = support.iter().zip(&g).map(|(&k, x)| p[k] * x).sum();
        let spread: f64 = support
            .iter()
            .zip(&g)
            .map(|(&k, x)| p[k] * (x - g_mean).powi(2))
            .sum();

        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand = mirror_step(&p, &support, &g, g_max, step);
            let v = coherent_information_raw(&cand, params);
            if v.is_finite() && v - value >= ARMIJO * step * spread {
                accepted = Some((cand, v));
                break;
            }
            step *= 0.5;
        }
        let accepted = match accepted {
            Some(a) => Some(a),
            None => polish(&p, &support, &g, value, params, config)?,
        };
        let Some((cand, v)) = accepted else {
            // no resolvable ascent left at working precision
            converged = true;
            break;
        };
        let change = v - value;
        p = cand;
        value = v;
        iterations += 1;
        step = (step * 2.0).min(MAX_STEP);
        // converged by the objective criterion, but keep polishing the iterate
        // until the gradient or the line search gives out
        if change < config.objective_tolerance {
            converged = true;
        }
    }

    let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    let residual = if support.len() <= 1 {
        0.0
    } else {
        norm(&support_gradient(
            &p,
            &support,
            params,
            config.gradient_mode,
        )?)
    };
    Ok(Run {
        p,
        value,
        iterations,
        converged,
        residual,
    })
}

fn start_points(n: usize, params: DephasingParams, config: &OptimizerConfig) -> Vec<Vec<f64>> {
    let base = ansatz_distribution(&DiscreteGaussianAnsatz::default_for(n));
    let base = if coherent_information_raw(base.probs(), params).is_finite() {
        base.probs().to_vec()
    } else {
        InputDistribution::uniform(n + 1).probs().to_vec()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut starts = vec![base.clone()];
    for _ in 1..config.restarts {
        let w: Vec<f64> = base
            .iter()
            .map(|x| x * rng.random_range(-0.5..0.5f64).exp())
            .collect();
        let s: f64 = w.iter().sum();
        starts.push(w.into_iter().map(|x| x / s).collect());
    }
    starts
}

/// Maximizes `J(p) = H(p) − S(A(p))` over distributions on `0..=n`.
///
/// The first start is the discrete Gaussian centred at `n/2` with width
/// `0.2n + 0.6`; further restarts perturb it multiplicatively. The best run is
/// returned even when it did not converge.
pub fn maximize_coherent_information(
    n: usize,
    params: DephasingParams,
    config: &OptimizerConfig,
) -> Result<CapacityResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    config.validate()?;
    let mut best: Option<Run> = None;
    for start in start_points(n, params, config) {
        let run = ascend(start, params, config)?;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    Ok(CapacityResult {
        gamma: params.gamma(),
        n,
        q_bits: best.value.max(0.0),
        p_opt: InputDistribution::from_raw(best.p),
        iterations: best.iterations,
        converged: best.converged,
        gradient_residual: best.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::two_point_lower_bound;

    fn params(g: f64) -> DephasingParams {
        DephasingParams::new(g).unwrap()
    }

    #[test]
    fn config_validation() {
        let c = OptimizerConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = OptimizerConfig {
            objective_tolerance: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert!(
            maximize_coherent_information(0, params(1.0), &OptimizerConfig::default()).is_err()
        );
    }

    #[test]
    fn two_levels_reach_the_closed_form() {
        for gamma in [0.1, 0.7, 2.5] {
            let r = maximize_coherent_information(1, params(gamma), &OptimizerConfig::default())
                .unwrap();
            let bound = two_point_lower_bound(params(gamma), 1).unwrap();
            assert!(r.converged);
            assert!((r.q_bits - bound.value_bits).abs() < 1e-8);
            assert!((r.p_opt.probs()[0] - 0.5).abs() < 1e-4);
        }
    }

    #[test]
    fn flat_optimum_is_polished_past_the_residual_tolerance() {
        let r = maximize_coherent_information(1, params(1.0), &OptimizerConfig::default()).unwrap();
        assert!(r.gradient_residual < 1e-11, "{r:?}");
        assert!((r.p_opt.probs()[0] - 0.5).abs() < 1e-11);
    }

    #[test]
    fn noiseless_optimum_is_uniform() {
        let r = maximize_coherent_information(3, params(0.0), &OptimizerConfig::default()).unwrap();
        assert!((r.q_bits - 2.0).abs() < 1e-12, "{r:?}");
        for x in r.p_opt.probs() {
            assert!((x - 0.25).abs() < 1e-6);
        }
    }

    #[test]
    fn optimum_is_symmetric_and_rises_to_centre() {
        let r = maximize_coherent_information(4, params(0.5), &OptimizerConfig::default()).unwrap();
        let p = r.p_opt.probs();
        assert!(r.converged);
        for m in 0..=4 {
            assert!((p[m] - p[4 - m]).abs() < 1e-3);
        }
        assert!(p[0] < p[1] && p[1] < p[2]);
        assert!((r.p_opt.mean_energy() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn finite_difference_mode_agrees() {
        let cfg = OptimizerConfig {
            gradient_mode: GradientMode::FiniteDifference,
            ..Default::default()
        };
        let a = maximize_coherent_information(3, params(1.0), &OptimizerConfig::default()).unwrap();
        let b = maximize_coherent_information(3, params(1.0), &cfg).unwrap();
        assert!((a.q_bits - b.q_bits).abs() < 1e-8);
    }

    #[test]
    fn result_is_within_bounds() {
        for n in [2, 5] {
            for gamma in [0.3, 3.0] {
                let r =
                    maximize_coherent_information(n, params(gamma), &OptimizerConfig::default())
                        .unwrap();
                assert!(r.q_bits >= 0.0 && r.q_bits <= ((n + 1) as f64).log2());
                assert!((r.p_opt.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exhausted_budget_is_flagged() {
        let cfg = OptimizerConfig {
            max_iterations: 1,
            restarts: 1,
            objective_tolerance: 1e-300,
            ..Default::default()
        };
        let r = maximize_coherent_information(6, params(0.4), &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 1);
    }
}
