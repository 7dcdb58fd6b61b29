use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::capacity::OptimizerConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

/// `γ` values, either listed or as an inclusive evenly spaced range.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaGrid {
    List {
        gammas: Vec<f64>,
    },
    Range {
        gamma_start: f64,
        gamma_stop: f64,
        gamma_count: usize,
    },
}

impl GammaGrid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Self::List { ref gammas } => gammas.clone(),
            Self::Range {
                gamma_start,
                gamma_stop,
                gamma_count,
            } => match gamma_count {
                0 => Vec::new(),
                1 => vec![gamma_start],
                c => (0..c)
                    .map(|i| {
                        let t = i as f64 / (c - 1) as f64;
                        gamma_start + (gamma_stop - gamma_start) * t
                    })
                    .collect(),
            },
        }
    }
}

/// Truncation levels, either listed or as an inclusive range.
#[derive(Debug, Clone, PartialEq)]
pub enum NGrid {
    List { n: Vec<usize> },
    Range { n_min: usize, n_max: usize },
}

impl NGrid {
    pub fn values(&self) -> Vec<usize> {
        match *self {
            Self::List { ref n } => n.clone(),
            Self::Range { n_min, n_max } => (n_min..=n_max).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GridSection {
    gammas: Option<Vec<f64>>,
    gamma_start: Option<f64>,
    gamma_stop: Option<f64>,
    gamma_count: Option<usize>,
    n: Option<Vec<usize>>,
    n_min: Option<usize>,
    n_max: Option<usize>,
}

impl GridSection {
    fn gamma(&self) -> Result<GammaGrid> {
        match (
            &self.gammas,
            self.gamma_start,
            self.gamma_stop,
            self.gamma_count,
        ) {
            (Some(g), None, None, None) => Ok(GammaGrid::List { gammas: g.clone() }),
            (None, Some(gamma_start), Some(gamma_stop), Some(gamma_count)) => {
                Ok(GammaGrid::Range {
                    gamma_start,
                    gamma_stop,
                    gamma_count,
                })
            }
            _ => Err(Error::Config(
                "[grid] needs either `gammas` or all of `gamma_start`, `gamma_stop`, `gamma_count`"
                    .into(),
            )),
        }
    }

    fn n(&self) -> Result<NGrid> {
        match (&self.n, self.n_min, self.n_max) {
            (Some(n), None, None) => Ok(NGrid::List { n: n.clone() }),
            (None, Some(n_min), Some(n_max)) => Ok(NGrid::Range { n_min, n_max }),
            _ => Err(Error::Config(
                "[grid] needs either `n` or both `n_min` and `n_max`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OutputSection {
    path: Option<PathBuf>,
    format: Option<OutputFormat>,
}

/// The sweep file as written on disk.
///
/// ```toml
/// [grid]
/// gammas = [0.25, 0.5, 1.0]      # or gamma_start, gamma_stop, gamma_count
/// n_min = 1                      # or n = [1, 2, 3]
/// n_max = 8
///
/// [optimizer]
/// objective_tolerance = 1e-10
/// seed = 7
///
/// [output]
/// path = "capacity.csv"
/// format = "csv"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweepConfig {
    grid: GridSection,
    #[serde(default)]
    optimizer: OptimizerConfig,
    #[serde(default)]
    output: OutputSection,
}

impl RawSweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies flag overrides (flags win) and validates the result.
    pub fn resolve(
        self,
        output_path: Option<PathBuf>,
        format: Option<OutputFormat>,
        seed: Option<u64>,
    ) -> Result<SweepConfig> {
        let mut optimizer = self.optimizer;
        if let Some(seed) = seed {
            optimizer.seed = seed;
        }
        let output_path = output_path.or(self.output.path).ok_or_else(|| {
            Error::Config("no output path in [output] or on the command line".into())
        })?;
        let config = SweepConfig {
            gammas: self.grid.gamma()?.values(),
            ns: self.grid.n()?.values(),
            optimizer,
            output_path,
            format: format.or(self.output.format).unwrap_or_default(),
        };
        config.validate()?;
        Ok(config)
    }
}

/// A fully resolved sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub gammas: Vec<f64>,
    pub ns: Vec<usize>,
    pub optimizer: OptimizerConfig,
    pub output_path: PathBuf,
    pub format: OutputFormat,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() {
            return Err(Error::Config("gamma grid is empty".into()));
        }
        if self.ns.is_empty() {
            return Err(Error::Config("N grid is empty".into()));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::Config(format!(
                "gamma values must be finite and >= 0, got {g}"
            )));
        }
        if self.ns.contains(&0) {
            return Err(Error::Config("N values must be at least 1".into()));
        }
        self.optimizer
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of everything that determines the table contents. The output
    /// path is excluded so that relocating a sweep keeps its hash.
    pub fn hash(&self) -> String {
        #[derive(Serialize)]
        struct Canonical<'a> {
            gammas: Vec<u64>,
            ns: &'a [usize],
            optimizer: &'a OptimizerConfig,
            format: OutputFormat,
        }
        let canonical = Canonical {
            gammas: self.gammas.iter().map(|g| g.to_bits()).collect(),
            ns: &self.ns,
            optimizer: &self.optimizer,
            format: self.format,
        };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
