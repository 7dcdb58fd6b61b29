use super::FockDensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Extent of the classical RK4 stability region on the negative real axis.
pub const RK4_STABILITY_LIMIT: f64 = 2.785;

#[derive(Debug, Clone)]
pub struct MasterEquationOutput {
    pub state: FockDensityMatrix,
    pub step: f64,
    /// Accumulated one-step error of the stiffest mode, `steps · |R(-hλ) - e^{-hλ}|`.
    pub estimated_error: f64,
}

fn number_operator(dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `L[ρ] = n̂ρn̂ − ½(n̂²ρ + ρn̂²)`, normalized so that evolving for time `t`
/// realizes the channel at rate `γ = t`.
pub fn dephasing_generator(rho: &CMatrix) -> CMatrix {
    let n = number_operator(rho.nrows());
    let n2 = &n * &n;
    let half = C64::new(0.5, 0.0);
    &n * rho * &n - (&n2 * rho + rho * &n2) * half
}

/// Largest decay rate of the generator on a space of this dimension.
fn stiffness(dim: usize) -> f64 {
    let n = (dim - 1) as f64;
    0.5 * n * n
}

fn rk4_amplification(z: f64) -> f64 {
    1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0
}

fn one_step_error(h: f64, lambda: f64) -> f64 {
    let z = -h * lambda;
    (rk4_amplification(z) - z.exp()).abs()
}

/// Step count that keeps the stiffest mode's accumulated RK4 error below `tol`.
pub fn steps_for_tolerance(t: f64, dim: usize, tol: f64) -> usize {
    let lambda = stiffness(dim);
    if t == 0.0 || lambda == 0.0 {
        return 1;
    }
    let x = lambda * t;
    // local error ≈ (hλ)^5 / 120
    let mut steps = ((x.powi(5) / (120.0 * tol)).powf(0.25).ceil() as usize).max(1);
    steps = steps.max((x / (0.5 * RK4_STABILITY_LIMIT)).ceil() as usize);
    while steps as f64 * one_step_error(t / steps as f64, lambda) > tol {
        steps += steps / 8 + 1;
    }
    steps
}

/// Integrates the dephasing master equation to time `t` with `steps` fixed
/// RK4 steps.
pub fn evolve_master_equation(
    rho: &FockDensityMatrix,
    t: f64,
    steps: usize,
) -> Result<MasterEquationOutput> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("evolution time {t}")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let h = t / steps as f64;
    let lambda = stiffness(rho.dim());
    if h * lambda > RK4_STABILITY_LIMIT {
        return Err(Error::StepTooCoarse {
            step: h,
            stiffness: lambda,
            local_error: one_step_error(h, lambda),
        });
    }
    let hc = C64::new(h, 0.0);
    let half = C64::new(0.5, 0.0);
    let sixth = C64::new(1.0 / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let mut y = rho.entries().clone();
    for _ in 0..steps {
        let k1 = dephasing_generator(&y);
        let k2 = dephasing_generator(&(&y + &k1 * (hc * half)));
        let k3 = dephasing_generator(&(&y + &k2 * (hc * half)));
        let k4 = dephasing_generator(&(&y + &k3 * hc));
        y += (k1 + k2 * two + k3 * two + k4) * (hc * sixth);
    }
    Ok(MasterEquationOutput {
        state: FockDensityMatrix::from_raw(y),
        step: h,
        estimated_error: steps as f64 * one_step_error(h, lambda),
    })
}
