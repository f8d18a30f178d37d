//! Declarative experiment runner: a JSON config selects a suite of checks,
//! the runner evaluates them and emits a JSON report with per-check verdicts.

mod config;
mod experiments;

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{Experiment, ExperimentConfig, Tolerances, SCHEMA_VERSION};

use crate::derham::{ComplexAssembly, TorusModel};
use crate::error::{Error, Result};
use crate::matrix_io;

/// How `value` is compared against `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "==")]
    Equal,
}

/// One check of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Set when the numerics could not decide the check at the configured tolerance.
    pub indeterminate: bool,
    /// The mathematical statement the check exercises.
    pub anchor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl Entry {
    /// Passes when `value <= tolerance`. Non-finite values fail.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64, anchor: &str) -> Self {
        let finite = value.is_finite();
        Entry {
            name: name.into(),
            value: if finite { value } else { f64::MAX },
            tolerance,
            comparison: Comparison::AtMost,
            pass: finite && value <= tolerance,
            indeterminate: false,
            anchor: anchor.into(),
            detail: None,
        }
    }

    /// Counts disagreements; passes when there are none.
    pub fn mismatches(name: impl Into<String>, count: usize, anchor: &str) -> Self {
        Entry {
            name: name.into(),
            value: count as f64,
            tolerance: 0.0,
            comparison: Comparison::Equal,
            pass: count == 0,
            indeterminate: false,
            anchor: anchor.into(),
            detail: None,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool, anchor: &str) -> Self {
        Self::mismatches(name, usize::from(!ok), anchor)
    }

    pub fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn mark_indeterminate(mut self, indeterminate: bool) -> Self {
        self.indeterminate = indeterminate;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Indeterminate,
}

impl Outcome {
    /// Process exit code: 0 pass, 1 failed check, 3 indeterminate.
    /// Configuration errors (exit 2) never reach a report.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Indeterminate => 3,
        }
    }
}

/// Everything in a report except wall-clock time; byte-identical across runs
/// with the same config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub entries: Vec<Entry>,
    pub overall_pass: bool,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(flatten)]
    pub body: ReportBody,
    pub duration_seconds: f64,
}

impl Report {
    fn assemble(config: ExperimentConfig, entries: Vec<Entry>, duration_seconds: f64) -> Self {
        let outcome = if entries.iter().any(|e| !e.pass && !e.indeterminate) {
            Outcome::Fail
        } else if entries.iter().any(|e| e.indeterminate) {
            Outcome::Indeterminate
        } else {
            Outcome::Pass
        };
        Report {
            body: ReportBody {
                schema_version: SCHEMA_VERSION,
                config,
                entries,
                overall_pass: outcome == Outcome::Pass,
                outcome,
            },
            duration_seconds,
        }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.body.entries
    }

    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.body.entries.iter().find(|e| e.name == name)
    }

    pub fn outcome(&self) -> Outcome {
        self.body.outcome
    }

    pub fn overall_pass(&self) -> bool {
        self.body.overall_pass
    }

    pub fn exit_code(&self) -> i32 {
        self.body.outcome.exit_code()
    }

    /// The deterministic part of the report.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report serialises")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Validates `config` and runs the selected experiment.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let entries = experiments::run(config)?;
    Ok(Report::assemble(config.clone(), entries, start.elapsed().as_secs_f64()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub anchor: &'static str,
}

/// The available experiments in a fixed order.
pub fn list_experiments() -> Vec<ExperimentInfo> {
    Experiment::ALL
        .into_iter()
        .map(|e| {
            let (description, anchor) = experiments::describe(e);
            ExperimentInfo { name: e.name(), description, anchor }
        })
        .collect()
}

/// Which assembled operator to dump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixSelector {
    D(usize),
    Adjoint(usize),
    Laplacian(usize),
    Gram(usize),
}

impl FromStr for MatrixSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("matrix selector {s:?} is not one of d:K, adjoint:K, laplacian:K, gram:K"));
        let (kind, k) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        match kind {
            "d" => Ok(MatrixSelector::D(k)),
            "adjoint" => Ok(MatrixSelector::Adjoint(k)),
            "laplacian" => Ok(MatrixSelector::Laplacian(k)),
            "gram" => Ok(MatrixSelector::Gram(k)),
            _ => Err(bad()),
        }
    }
}

/// Assembles the complex described by `config` and writes the selected
/// operator as a dense matrix file.
pub fn dump_matrix(config: &ExperimentConfig, selector: MatrixSelector, path: &Path) -> Result<()> {
    config.validate()?;
    let model =
        TorusModel::with_metric(config.dim2n, config.fourier_cutoff, config.hermite_cutoff, config.metric_or_identity())?;
    let assembly = ComplexAssembly::build(&config.connection, &model, config.sobolev_index)?;
    let op = match selector {
        MatrixSelector::D(k) => assembly.d(k)?,
        MatrixSelector::Adjoint(k) => assembly.d_adjoint(k)?,
        MatrixSelector::Laplacian(k) => assembly.laplacian(k)?,
        MatrixSelector::Gram(k) => assembly.gram(k)?,
    };
    matrix_io::write_matrix(path, &op.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_precedence() {
        let cfg = ExperimentConfig::new(Experiment::Cartan, 0);
        let ok = Entry::at_most("a", 0.0, 1.0, "");
        let bad = Entry::at_most("b", 2.0, 1.0, "");
        let unsure = Entry::holds("c", false, "").mark_indeterminate(true);
        assert_eq!(Report::assemble(cfg.clone(), vec![ok.clone()], 0.0).outcome(), Outcome::Pass);
        assert_eq!(Report::assemble(cfg.clone(), vec![ok.clone(), unsure.clone()], 0.0).outcome(), Outcome::Indeterminate);
        assert_eq!(Report::assemble(cfg, vec![ok, unsure, bad], 0.0).outcome(), Outcome::Fail);
        assert!(!Entry::at_most("nan", f64::NAN, 1.0, "").pass);
    }

    #[test]
    fn selector_parsing() {
        assert_eq!("d:1".parse::<MatrixSelector>().unwrap(), MatrixSelector::D(1));
        assert_eq!("laplacian:0".parse::<MatrixSelector>().unwrap(), MatrixSelector::Laplacian(0));
        for s in ["d", "x:1", "d:-1", "gram:"] {
            assert!(s.parse::<MatrixSelector>().is_err());
        }
    }

    #[test]
    fn listing_is_stable() {
        let names: Vec<_> = list_experiments().iter().map(|e| e.name).collect();
        assert_eq!(names, ["cartan", "axioms", "oscillator", "symbol", "cohomology", "mishchenko", "gap-scan"]);
    }
}
