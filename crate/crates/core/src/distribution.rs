use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance for a probability vector.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Fock-state weights `p_0..p_N` of a diagonal input state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct InputDistribution {
    p: Vec<f64>,
}

impl InputDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution(
                "empty probability vector".into(),
            ));
        }
        if let Some((i, &x)) = p
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "p[{i}] = {x} is not a probability"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self { p })
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(w: &[f64]) -> Result<Self> {
        let sum: f64 = w.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Self::new(w.iter().map(|x| x / sum).collect())
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0);
        Self {
            p: vec![1.0 / dim as f64; dim],
        }
    }

    pub fn point_mass(dim: usize, level: usize) -> Self {
        assert!(level < dim);
        let mut p = vec![0.0; dim];
        p[level] = 1.0;
        Self { p }
    }

    pub(crate) fn from_raw(p: Vec<f64>) -> Self {
        Self { p }
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    /// Highest Fock level `N`.
    pub fn max_level(&self) -> usize {
        self.p.len() - 1
    }

    pub fn mean_energy(&self) -> f64 {
        self.p.iter().enumerate().map(|(m, &x)| m as f64 * x).sum()
    }

    /// Indices with strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.p.len()).filter(|&i| self.p[i] > 0.0).collect()
    }

    /// Pads with zero weights up to `dim` levels.
    pub fn padded(&self, dim: usize) -> Self {
        let mut p = self.p.clone();
        if dim > p.len() {
            p.resize(dim, 0.0);
        }
        Self { p }
    }
}

impl TryFrom<Vec<f64>> for InputDistribution {
    type Error = Error;
    fn try_from(p: Vec<f64>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<InputDistribution> for Vec<f64> {
    fn from(d: InputDistribution) -> Self {
        d.p
    }
}
