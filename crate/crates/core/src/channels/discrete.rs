use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{DiscreteDist, PrivacyLevel, Pushforward, AUDIT_SLACK, PROB_TOL};
use crate::error::{Error, Result};

/// A channel between finite alphabets given by a row-stochastic matrix.
///
/// Inputs are points of `R^dim`; outputs are scalar labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ChannelSpec", into = "ChannelSpec")]
pub struct DiscreteChannel {
    input_dim: usize,
    inputs: Vec<f64>,
    outputs: Vec<f64>,
    /// Row-major, one row per input.
    matrix: Vec<f64>,
    index: HashMap<Vec<u64>, usize>,
}

/// Serialized form of a [`DiscreteChannel`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
}

impl TryFrom<ChannelSpec> for DiscreteChannel {
    type Error = Error;

    fn try_from(spec: ChannelSpec) -> Result<Self> {
        DiscreteChannel::new(spec.inputs, spec.outputs, spec.matrix)
    }
}

impl From<DiscreteChannel> for ChannelSpec {
    fn from(c: DiscreteChannel) -> Self {
        ChannelSpec {
            inputs: c.inputs().map(|x| x.to_vec()).collect(),
            outputs: c.outputs.clone(),
            matrix: (0..c.n_inputs()).map(|i| c.row(i).to_vec()).collect(),
        }
    }
}

fn key(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| (v + 0.0).to_bits()).collect()
}

impl DiscreteChannel {
    pub fn new(inputs: Vec<Vec<f64>>, outputs: Vec<f64>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        if inputs.is_empty() || outputs.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if matrix.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                got: matrix.len(),
            });
        }
        let input_dim = inputs[0].len();
        let mut flat_inputs = Vec::with_capacity(inputs.len() * input_dim);
        let mut index = HashMap::with_capacity(inputs.len());
        for (i, x) in inputs.iter().enumerate() {
            if x.len() != input_dim {
                return Err(Error::DimensionMismatch {
                    expected: input_dim,
                    got: x.len(),
                });
            }
            if x.iter().any(|v| v.is_nan()) {
                return Err(Error::InvalidChannel("input symbol is NaN".into()));
            }
            if index.insert(key(x), i).is_some() {
                return Err(Error::InvalidChannel(format!("duplicate input symbol {x:?}")));
            }
            flat_inputs.extend(x.iter().map(|v| v + 0.0));
        }
        let mut seen = std::collections::HashSet::new();
        for z in &outputs {
            if z.is_nan() || !seen.insert((z + 0.0).to_bits()) {
                return Err(Error::InvalidChannel(format!("bad or duplicate output symbol {z}")));
            }
        }
        let mut flat = Vec::with_capacity(inputs.len() * outputs.len());
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != outputs.len() {
                return Err(Error::DimensionMismatch {
                    expected: outputs.len(),
                    got: row.len(),
                });
            }
            if row.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
                return Err(Error::InvalidChannel(format!("row {i} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidChannel(format!("row {i} sums to {s}")));
            }
            flat.extend_from_slice(row);
        }
        Ok(Self {
            input_dim,
            inputs: flat_inputs,
            outputs,
            matrix: flat,
            index,
        })
    }

    /// Identity channel on the symbols `0..k`.
    pub fn identity(k: usize) -> Result<Self> {
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(symbols(k), (0..k).map(|j| j as f64).collect(), rows)
    }

    /// k-ary randomized response: keep the symbol with probability
    /// `e^alpha / (e^alpha + k - 1)`, otherwise report one of the others uniformly.
    pub fn randomized_response(k: usize, level: PrivacyLevel) -> Result<Self> {
        let denom = level.exp_alpha() + (k as f64 - 1.0);
        let keep = level.exp_alpha() / denom;
        let other = 1.0 / denom;
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { keep } else { other }).collect())
            .collect();
        Self::new(symbols(k), (0..k).map(|j| j as f64).collect(), rows)
    }

    /// Channel whose rows all equal `probs`.
    pub fn constant(k: usize, probs: &[f64]) -> Result<Self> {
        let rows = (0..k).map(|_| probs.to_vec()).collect();
        Self::new(symbols(k), (0..probs.len()).map(|j| j as f64).collect(), rows)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len() / self.input_dim.max(1)
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn inputs(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.inputs.chunks_exact(self.input_dim)
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.outputs.len();
        &self.matrix[i * k..(i + 1) * k]
    }

    pub fn input_index(&self, x: &[f64]) -> Option<usize> {
        self.index.get(&key(x)).copied()
    }

    /// Largest `log(Q(z|x) / Q(z|x'))` over outputs and input pairs.
    ///
    /// Columns that vanish identically contribute ratio one; a column with
    /// both a zero and a positive entry gives `+inf`.
    pub fn max_log_ratio(&self) -> Result<f64> {
        if self.n_inputs() == 0 || self.outputs.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut worst = 0.0f64;
        for z in 0..self.outputs.len() {
            let mut max = 0.0f64;
            let mut min = f64::INFINITY;
            for i in 0..self.n_inputs() {
                let q = self.row(i)[z];
                max = max.max(q);
                min = min.min(q);
            }
            if max == 0.0 {
                continue;
            }
            if min == 0.0 {
                return Ok(f64::INFINITY);
            }
            worst = worst.max((max / min).ln());
        }
        Ok(worst)
    }
}

fn symbols(k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|i| vec![i as f64]).collect()
}

impl Pushforward for DiscreteChannel {
    fn pushforward(&self, p: &DiscreteDist) -> Result<DiscreteDist> {
        let mut out = vec![0.0; self.outputs.len()];
        for (x, w) in p.iter() {
            let i = self.input_index(x).ok_or_else(|| Error::UnknownAtom(x.to_vec()))?;
            for (o, q) in out.iter_mut().zip(self.row(i)) {
                *o += w * q;
            }
        }
        DiscreteDist::normalized(1, self.outputs.clone(), out)
    }
}

/// Result of auditing a channel against a privacy budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Audit {
    pub max_log_ratio: f64,
    pub alpha: f64,
    pub passed: bool,
}

/// Checks the likelihood-ratio bound of `channel` against `level`.
pub fn audit_privacy(channel: &DiscreteChannel, level: PrivacyLevel) -> Result<Audit> {
    let max_log_ratio = channel.max_log_ratio()?;
    Ok(Audit {
        max_log_ratio,
        alpha: level.alpha(),
        passed: max_log_ratio <= level.alpha() + AUDIT_SLACK,
    })
}
