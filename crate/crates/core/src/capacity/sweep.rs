use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::optimizer::{maximize_coherent_information, CapacityResult, OptimizerConfig};
use crate::error::{Error, Result};
use crate::fock::DephasingParams;

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub gamma: f64,
    pub n: usize,
    pub outcome: Result<CapacityResult>,
    pub wall_time: Duration,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for one grid point; depends only on the base seed and the point.
pub fn point_seed(seed: u64, gamma: f64, n: usize) -> u64 {
    splitmix64(seed ^ splitmix64(gamma.to_bits() ^ splitmix64(n as u64)))
}

/// One optimization per `(N, γ)` pair, `N`-major in input order. Points run on
/// the current rayon pool; a failing point is recorded and the sweep goes on.
pub fn capacity_sweep(
    gammas: &[f64],
    ns: &[usize],
    config: &OptimizerConfig,
) -> Result<Vec<SweepPoint>> {
    if gammas.is_empty() || ns.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep grids must be nonempty".into(),
        ));
    }
    config.validate()?;
    let grid: Vec<(usize, f64)> = ns
        .iter()
        .flat_map(|&n| gammas.iter().map(move |&g| (n, g)))
        .collect();
    Ok(grid
        .into_par_iter()
        .map(|(n, gamma)| {
            let started = Instant::now();
            let point_config = OptimizerConfig {
                seed: point_seed(config.seed, gamma, n),
                ..config.clone()
            };
            let outcome = DephasingParams::new(gamma)
                .and_then(|p| maximize_coherent_information(n, p, &point_config));
            SweepPoint {
                gamma,
                n,
                outcome,
                wall_time: started.elapsed(),
            }
        })
        .collect())
}
