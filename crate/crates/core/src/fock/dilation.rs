//! Coherent states, the environment output, and the explicit dilated state.

use super::{DephasingParams, FockDensityMatrix};
use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use nalgebra::DVector;

/// Largest Poisson tail mass a truncated coherent state may drop.
pub const ENV_RESIDUAL_BOUND: f64 = 1e-12;

/// Truncated Fock expansion of the coherent state `|α⟩`.
#[derive(Debug, Clone)]
pub struct CoherentVector {
    amplitude: C64,
    entries: DVector<C64>,
}

impl CoherentVector {
    /// `entries[k] = e^{-|α|²/2} α^k / √(k!)` for `k < dim`.
    pub fn new(amplitude: C64, dim: usize) -> Self {
        assert!(dim > 0);
        let r = amplitude.norm();
        let arg = amplitude.arg();
        let mut entries = DVector::from_element(dim, C64::new(0.0, 0.0));
        if r == 0.0 {
            entries[0] = C64::new(1.0, 0.0);
        } else {
            let ln_r = r.ln();
            let mut ln_fact = 0.0;
            for k in 0..dim {
                if k > 0 {
                    ln_fact += (k as f64).ln();
                }
                let ln_mag = -0.5 * r * r + k as f64 * ln_r - 0.5 * ln_fact;
                entries[k] = C64::from_polar(ln_mag.exp(), arg * k as f64);
            }
        }
        Self { amplitude, entries }
    }

    pub fn amplitude(&self) -> C64 {
        self.amplitude
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &DVector<C64> {
        &self.entries
    }

    /// Norm lost to truncation, `1 − Σ_k |entries[k]|²`, summed from the tail.
    pub fn truncation_residual(&self) -> f64 {
        poisson_tail(self.amplitude.norm_sqr(), self.dim())
    }

    /// `⟨self|other⟩` over the truncated space.
    pub fn inner(&self, other: &Self) -> C64 {
        self.entries.dotc(&other.entries)
    }
}

/// `P[X ≥ k0]` for `X ~ Poisson(λ)`, summed directly over the tail.
pub fn poisson_tail(lambda: f64, k0: usize) -> f64 {
    if lambda == 0.0 {
        return if k0 == 0 { 1.0 } else { 0.0 };
    }
    let ln_lambda = lambda.ln();
    let ln_fact: f64 = (1..=k0).map(|i| (i as f64).ln()).sum();
    let mut ln_term = -lambda + k0 as f64 * ln_lambda - ln_fact;
    let mut k = k0;
    let mut sum = 0.0;
    loop {
        let term = ln_term.exp();
        sum += term;
        k += 1;
        ln_term += ln_lambda - (k as f64).ln();
        // past the mode the terms decay at least geometrically
        if (k as f64) > lambda && (term < sum * 1e-18 || term < 1e-300) {
            break;
        }
    }
    sum.min(1.0)
}

/// `ceil(γN² + 10·√max(γN², 1) + 20)`.
pub fn default_env_dim(params: DephasingParams, max_level: usize) -> usize {
    let mean = params.gamma() * (max_level * max_level) as f64;
    (mean + 10.0 * mean.max(1.0).sqrt() + 20.0).ceil() as usize
}

/// Checks that every `|√γ m⟩`, `m ≤ max_level`, fits in `env_dim` levels.
pub fn check_env_dim(params: DephasingParams, max_level: usize, env_dim: usize) -> Result<()> {
    if env_dim == 0 {
        return Err(Error::InvalidArgument("env_dim must be positive".into()));
    }
    let (level, residual) = (0..=max_level)
        .map(|m| (m, poisson_tail(params.gamma() * (m * m) as f64, env_dim)))
        .fold(
            (0, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    if residual >= ENV_RESIDUAL_BOUND {
        return Err(Error::EnvironmentTruncation {
            env_dim,
            level,
            residual,
            bound: ENV_RESIDUAL_BOUND,
        });
    }
    Ok(())
}

/// `Σ_m p_m |√γ m⟩⟨√γ m|` on `env_dim` environment levels. The global
/// rotation `exp(-iπ a†a / 2)` relating this to `Tr_S[U(ρ⊗|0⟩⟨0|)U†]` is left
/// out; it does not change the spectrum.
pub fn complementary_output(
    p: &InputDistribution,
    params: DephasingParams,
    env_dim: usize,
) -> Result<FockDensityMatrix> {
    check_env_dim(params, p.max_level(), env_dim)?;
    let mut omega = CMatrix::zeros(env_dim, env_dim);
    for (m, &w) in p.probs().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let v = CoherentVector::new(C64::new(params.gamma().sqrt() * m as f64, 0.0), env_dim);
        omega += v.entries() * v.entries().adjoint() * C64::new(w, 0.0);
    }
    Ok(FockDensityMatrix::from_raw(omega))
}

/// State on system ⊗ environment, system-major: row `m·env_dim + k`.
#[derive(Debug, Clone)]
pub struct JointState {
    sys_dim: usize,
    env_dim: usize,
    entries: CMatrix,
}

impl JointState {
    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Traces out the environment.
    pub fn system_marginal(&self) -> CMatrix {
        let (s, e) = (self.sys_dim, self.env_dim);
        CMatrix::from_fn(s, s, |m, n| {
            (0..e).map(|k| self.entries[(m * e + k, n * e + k)]).sum()
        })
    }

    /// Traces out the system.
    pub fn environment_marginal(&self) -> CMatrix {
        let (s, e) = (self.sys_dim, self.env_dim);
        CMatrix::from_fn(e, e, |k, l| {
            (0..s).map(|m| self.entries[(m * e + k, m * e + l)]).sum()
        })
    }
}

/// `Σ ρ_{m,n} |m⟩⟨n| ⊗ |−i√γ m⟩⟨−i√γ n|`, the dilated state `U(ρ⊗|0⟩⟨0|)U†`.
pub fn dilated_state(
    rho: &FockDensityMatrix,
    params: DephasingParams,
    env_dim: usize,
) -> Result<JointState> {
    let sys_dim = rho.dim();
    check_env_dim(params, sys_dim - 1, env_dim)?;
    let env: Vec<CoherentVector> = (0..sys_dim)
        .map(|m| CoherentVector::new(C64::new(0.0, -params.gamma().sqrt() * m as f64), env_dim))
        .collect();
    let dim = sys_dim * env_dim;
    let mut entries = CMatrix::zeros(dim, dim);
    for m in 0..sys_dim {
        for n in 0..sys_dim {
            let r = rho.get(m, n);
            if r == C64::new(0.0, 0.0) {
                continue;
            }
            let (vm, vn) = (env[m].entries(), env[n].entries());
            for k in 0..env_dim {
                let a = r * vm[k];
                for l in 0..env_dim {
                    entries[(m * env_dim + k, n * env_dim + l)] = a * vn[l].conj();
                }
            }
        }
    }
    Ok(JointState {
        sys_dim,
        env_dim,
        entries,
    })
}

/// Both marginals of the dilated state: `(system output, environment output)`.
pub fn dilation_oracle(
    rho: &FockDensityMatrix,
    params: DephasingParams,
    env_dim: usize,
) -> Result<(FockDensityMatrix, FockDensityMatrix)> {
    let joint = dilated_state(rho, params, env_dim)?;
    Ok((
        FockDensityMatrix::from_raw(joint.system_marginal()),
        FockDensityMatrix::from_raw(joint.environment_marginal()),
    ))
}
