use super::{DephasingParams, FockDensityMatrix};
use crate::error::Result;
use crate::linalg::{CMatrix, C64};

/// Closed form: `ρ[m][n] ↦ exp(-γ (m-n)² / 2) ρ[m][n]`.
pub fn apply_dephasing(rho: &FockDensityMatrix, params: DephasingParams) -> FockDensityMatrix {
    let d = rho.dim();
    let src = rho.entries();
    let out = CMatrix::from_fn(d, d, |m, n| {
        if m == n {
            src[(m, n)]
        } else {
            src[(m, n)] * params.coherence_factor(m as i64 - n as i64)
        }
    });
    FockDensityMatrix::from_raw(out)
}

/// Returns `(N_γ2 ∘ N_γ1)(ρ)` and `N_{γ1+γ2}(ρ)`.
pub fn compose_check(
    gamma1: f64,
    gamma2: f64,
    rho: &FockDensityMatrix,
) -> Result<(FockDensityMatrix, FockDensityMatrix)> {
    let first = DephasingParams::new(gamma1)?;
    let second = DephasingParams::new(gamma2)?;
    let combined = DephasingParams::new(gamma1 + gamma2)?;
    let sequential = apply_dephasing(&apply_dephasing(rho, first), second);
    Ok((sequential, apply_dephasing(rho, combined)))
}

/// Conjugation by `U_θ = exp(-iθ a†a)`: `ρ[m][n] ↦ exp(-iθ(m-n)) ρ[m][n]`.
pub fn phase_rotate(rho: &FockDensityMatrix, theta: f64) -> FockDensityMatrix {
    let d = rho.dim();
    let src = rho.entries();
    let out = CMatrix::from_fn(d, d, |m, n| {
        if m == n {
            src[(m, n)]
        } else {
            src[(m, n)] * C64::from_polar(1.0, -theta * (m as f64 - n as f64))
        }
    });
    FockDensityMatrix::from_raw(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_density_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus_state() -> FockDensityMatrix {
        FockDensityMatrix::new(CMatrix::from_element(2, 2, C64::new(0.5, 0.0))).unwrap()
    }

    fn random_state(dim: usize, seed: u64) -> FockDensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FockDensityMatrix::new(random_density_matrix(dim, &mut rng)).unwrap()
    }

    #[test]
    fn zero_rate_is_identity() {
        let rho = random_state(4, 1);
        let out = apply_dephasing(&rho, DephasingParams::new(0.0).unwrap());
        assert_eq!(out, rho);
    }

    #[test]
    fn populations_are_preserved_exactly() {
        let rho = random_state(6, 2);
        for gamma in [0.1, 1.0, 7.5] {
            let out = apply_dephasing(&rho, DephasingParams::new(gamma).unwrap());
            assert_eq!(out.diagonal(), rho.diagonal());
            out.validate().unwrap();
        }
    }

    #[test]
    fn plus_state_coherence_at_unit_rate() {
        let out = apply_dephasing(&plus_state(), DephasingParams::new(1.0).unwrap());
        // 0.5 * exp(-1/2)
        assert!((out.get(0, 1).re - 0.303265329856317).abs() < 1e-14);
        assert!((out.get(1, 0).re - 0.303265329856317).abs() < 1e-14);
    }

    #[test]
    fn semigroup_identity_element() {
        let rho = random_state(4, 3);
        let (seq, comb) = compose_check(0.0, 1.3, &rho).unwrap();
        let direct = apply_dephasing(&rho, DephasingParams::new(1.3).unwrap());
        assert!(seq.max_abs_diff(&direct) < 1e-15);
        assert!(comb.max_abs_diff(&direct) < 1e-15);
    }

    #[test]
    fn semigroup_composition() {
        let rho = random_state(5, 4);
        for (g1, g2) in [(0.5, 0.5), (2.0, 3.0)] {
            let (seq, comb) = compose_check(g1, g2, &rho).unwrap();
            assert!(seq.max_abs_diff(&comb) < 1e-14);
        }
        assert!(compose_check(-1.0, 1.0, &rho).is_err());
    }

    #[test]
    fn rotation_by_pi_flips_coherences() {
        let out = phase_rotate(&plus_state(), std::f64::consts::PI);
        assert!((out.get(0, 1) - C64::new(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(phase_rotate(&plus_state(), 0.0), plus_state());
    }

    #[test]
    fn channel_is_phase_covariant() {
        let rho = random_state(5, 5);
        let params = DephasingParams::new(0.8).unwrap();
        for theta in [0.3, 1.7, 4.0] {
            let a = apply_dephasing(&phase_rotate(&rho, theta), params);
            let b = phase_rotate(&apply_dephasing(&rho, params), theta);
            assert!(a.max_abs_diff(&b) < 1e-14);
        }
    }
}
