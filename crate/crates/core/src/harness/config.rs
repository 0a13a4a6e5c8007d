use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{LossFn, ModelSpec};
use crate::representers::FamilySpec;

/// Estimator run on the released bits of each replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EstimatorSpec {
    /// Sample mean of the released values plus `shift`, projected onto the
    /// functional range unless `project` is false.
    SampleMean {
        #[serde(default)]
        shift: f64,
        #[serde(default = "default_true")]
        project: bool,
    },
    /// Binary search over a grid of width `delta`. Without `delta` the width
    /// is tuned per cell from the released-bit Hellinger modulus at
    /// `n^-1/2`.
    BinarySearch {
        #[serde(default)]
        delta: Option<f64>,
    },
}

fn default_true() -> bool {
    true
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        EstimatorSpec::SampleMean {
            shift: 0.0,
            project: true,
        }
    }
}

/// One Monte Carlo experiment: every `(alpha, n)` pair is a cell with
/// `replicates` independent replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub family: FamilySpec,
    #[serde(default)]
    pub estimator: EstimatorSpec,
    #[serde(default)]
    pub loss: LossFn,
    pub alphas: Vec<f64>,
    pub ns: Vec<u64>,
    pub replicates: u64,
    pub seed: u64,
    /// JSON-Lines results file. CSV and metadata are written next to it.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

pub const MIN_REPLICATES: u64 = 100;

fn config_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < MIN_REPLICATES {
            return Err(config_err(
                "replicates",
                format!("{} is below the minimum of {MIN_REPLICATES}", self.replicates),
            ));
        }
        if self.alphas.is_empty() {
            return Err(config_err("alphas", "list is empty"));
        }
        for (i, a) in self.alphas.iter().enumerate() {
            if !(a.is_finite() && *a > 0.0) {
                return Err(config_err(&format!("alphas[{i}]"), format!("{a} is not a privacy level")));
            }
        }
        if self.ns.is_empty() {
            return Err(config_err("ns", "list is empty"));
        }
        if self.ns[0] == 0 {
            return Err(config_err("ns[0]", "sample sizes must be positive"));
        }
        for (i, w) in self.ns.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(config_err(
                    &format!("ns[{}]", i + 1),
                    format!("{} does not exceed {}", w[1], w[0]),
                ));
            }
        }
        self.loss
            .validate()
            .map_err(|e| config_err("loss", e.to_string()))?;
        match &self.estimator {
            EstimatorSpec::SampleMean { shift, .. } if !shift.is_finite() => {
                return Err(config_err("estimator.shift", "must be finite"));
            }
            EstimatorSpec::BinarySearch { delta: Some(d) } if !(d.is_finite() && *d >= 0.0) => {
                return Err(config_err("estimator.delta", format!("{d} is not a width")));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Parses and validates a config. Syntax errors carry the line and column;
/// schema violations carry the path of the offending field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ExperimentConfig = match serde_path_to_error::deserialize(de) {
        Ok(c) => c,
        Err(err) => {
            let path = err.path().to_string();
            let inner = err.into_inner();
            return Err(match inner.classify() {
                serde_json::error::Category::Data => config_err(&path, inner.to_string()),
                _ => Error::Parse {
                    line: inner.line(),
                    column: inner.column(),
                    message: inner.to_string(),
                },
            });
        }
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}
