use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::derham::ConnectionSpec;
use crate::error::{Error, Result};
use crate::exterior::Metric;

pub const SCHEMA_VERSION: u32 = 1;

/// Named verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Cartan,
    Axioms,
    Oscillator,
    Symbol,
    Cohomology,
    Mishchenko,
    GapScan,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Cartan,
        Experiment::Axioms,
        Experiment::Oscillator,
        Experiment::Symbol,
        Experiment::Cohomology,
        Experiment::Mishchenko,
        Experiment::GapScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Cartan => "cartan",
            Experiment::Axioms => "axioms",
            Experiment::Oscillator => "oscillator",
            Experiment::Symbol => "symbol",
            Experiment::Cohomology => "cohomology",
            Experiment::Mishchenko => "mishchenko",
            Experiment::GapScan => "gap-scan",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// Thresholds used by the checks; every value is relative unless noted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Singular/eigenvalue cut-off for numerical ranks and kernels.
    pub rank_rel: f64,
    /// Identities evaluated through products of random data.
    pub residual: f64,
    /// Identities that hold up to rounding of a handful of operations.
    pub exact: f64,
    /// Absolute tolerance on spectral-gap comparisons.
    pub gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rank_rel: 1e-8, residual: 1e-10, exact: 1e-12, gap: 1e-6 }
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_dim() -> usize {
    2
}
fn default_fourier() -> usize {
    2
}
fn default_hermite() -> usize {
    4
}
fn default_samples() -> usize {
    100
}
fn default_grid() -> usize {
    10
}

/// One experiment run. `experiment` and `seed` are mandatory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub experiment: Experiment,
    #[serde(default = "default_dim")]
    pub dim2n: usize,
    #[serde(default = "default_fourier")]
    pub fourier_cutoff: usize,
    #[serde(default = "default_hermite")]
    pub hermite_cutoff: usize,
    #[serde(default = "trivial")]
    pub connection: ConnectionSpec,
    /// Constant metric on the torus / `V`; identity when absent.
    #[serde(default)]
    pub metric: Option<Metric>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sobolev_index: i32,
    /// Points per axis of the `gap-scan` twist grid.
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn trivial() -> ConnectionSpec {
    ConnectionSpec::Trivial
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            experiment,
            dim2n: default_dim(),
            fourier_cutoff: default_fourier(),
            hermite_cutoff: default_hermite(),
            connection: ConnectionSpec::Trivial,
            metric: None,
            samples: default_samples(),
            seed,
            tolerances: Tolerances::default(),
            sobolev_index: 0,
            grid: default_grid(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.dim2n == 0 || !self.dim2n.is_multiple_of(2) || self.dim2n > 8 {
            return bad(format!("dim2n must be even in 2..=8, got {}", self.dim2n));
        }
        if self.fourier_cutoff == 0 {
            return bad("fourier_cutoff must be positive".into());
        }
        if self.hermite_cutoff < 2 {
            return bad(format!("hermite_cutoff must be at least 2, got {}", self.hermite_cutoff));
        }
        if self.samples == 0 || self.grid == 0 {
            return bad("samples and grid must be positive".into());
        }
        if let Some(g) = &self.metric {
            if g.dim() != self.dim2n {
                return bad(format!("metric is {}x{}, dim2n is {}", g.dim(), g.dim(), self.dim2n));
            }
        }
        let t = &self.tolerances;
        if ![t.rank_rel, t.residual, t.exact, t.gap].iter().all(|x| x.is_finite() && *x > 0.0) {
            return bad("tolerances must be positive and finite".into());
        }
        self.connection.validate(self.dim2n).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn metric_or_identity(&self) -> Metric {
        self.metric.clone().unwrap_or_else(|| Metric::identity(self.dim2n))
    }
}
