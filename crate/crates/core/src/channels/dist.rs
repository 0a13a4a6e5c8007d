use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::PROB_TOL;
use crate::error::{Error, Result};

/// A probability distribution on finitely many points of `R^dim`.
///
/// Atoms are stored flat and sorted lexicographically, so two distributions
/// can be compared by a single merge pass. Zero weights are kept: they still
/// count as support points for the channel lookups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistSpec", into = "DistSpec")]
pub struct DiscreteDist {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

/// Plain serialized form: one row per atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistSpec {
    pub atoms: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl TryFrom<DistSpec> for DiscreteDist {
    type Error = Error;

    fn try_from(spec: DistSpec) -> Result<Self> {
        DiscreteDist::new(spec.atoms, spec.weights)
    }
}

impl From<DiscreteDist> for DistSpec {
    fn from(d: DiscreteDist) -> Self {
        DistSpec {
            atoms: d.atoms().map(|a| a.to_vec()).collect(),
            weights: d.weights,
        }
    }
}

pub(crate) fn cmp_points(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

impl DiscreteDist {
    /// Builds a distribution, checking that weights are non-negative, sum to
    /// one within `1e-12`, and that atoms are pairwise distinct.
    pub fn new(atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let dim = atoms.first().map(|a| a.len()).ok_or(Error::EmptyAlphabet)?;
        let mut coords = Vec::with_capacity(atoms.len() * dim);
        for a in &atoms {
            if a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
            coords.extend_from_slice(a);
        }
        Self::from_flat(dim, coords, weights)
    }

    /// Same as [`DiscreteDist::new`] for atoms given as a flat coordinate list.
    pub fn from_flat(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::build(dim, coords, weights, PROB_TOL, false)
    }

    /// One-dimensional distribution.
    pub fn scalar(values: &[f64], weights: &[f64]) -> Result<Self> {
        Self::from_flat(1, values.to_vec(), weights.to_vec())
    }

    pub fn point_mass(x: &[f64]) -> Self {
        Self {
            dim: x.len(),
            coords: x.iter().map(|v| v + 0.0).collect(),
            weights: vec![1.0],
        }
    }

    /// Like `from_flat`, but accepts accumulated rounding up to `1e-9` and
    /// rescales the weights to sum to one.
    pub(crate) fn normalized(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::build(dim, coords, weights, 1e-9, true)
    }

    fn build(
        dim: usize,
        mut coords: Vec<f64>,
        mut weights: Vec<f64>,
        tol: f64,
        rescale: bool,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if dim == 0 || coords.len() != dim * weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} coordinates do not describe {} atoms of dimension {dim}",
                coords.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("weight {w} is not a probability")));
        }
        if coords.iter().any(|c| c.is_nan()) {
            return Err(Error::InvalidDistribution("atom coordinate is NaN".into()));
        }
        // -0.0 and 0.0 are the same atom
        for c in coords.iter_mut() {
            *c += 0.0;
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        if rescale {
            weights.iter_mut().for_each(|w| *w /= total);
        }

        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&i, &j| {
            cmp_points(&coords[i * dim..(i + 1) * dim], &coords[j * dim..(j + 1) * dim])
        });
        let mut sorted_coords = Vec::with_capacity(coords.len());
        let mut sorted_weights = Vec::with_capacity(weights.len());
        for (k, &i) in order.iter().enumerate() {
            let atom = &coords[i * dim..(i + 1) * dim];
            if k > 0 {
                let prev = &sorted_coords[(k - 1) * dim..k * dim];
                if cmp_points(prev, atom) == Ordering::Equal {
                    return Err(Error::InvalidDistribution(format!(
                        "duplicate atom {atom:?}"
                    )));
                }
            }
            sorted_coords.extend_from_slice(atom);
            sorted_weights.push(weights[i]);
        }
        Ok(Self {
            dim,
            coords: sorted_coords,
            weights: sorted_weights,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn atom(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn atoms(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.atoms().zip(self.weights.iter().copied())
    }

    /// Weight of `x`, zero when `x` is not an atom.
    pub fn weight_of(&self, x: &[f64]) -> f64 {
        let mut lo = 0;
        let mut hi = self.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            match cmp_points(self.atom(mid), x) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return self.weights[mid],
            }
        }
        0.0
    }

    pub fn expectation<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// `(1 - lambda) self + lambda other` on the merged support.
    pub fn mixture(&self, other: &DiscreteDist, lambda: f64) -> Result<DiscreteDist> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(crate::error::invalid("lambda", format!("{lambda} not in [0, 1]")));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        merge(self, other, |atom, p, q| {
            coords.extend_from_slice(atom);
            weights.push((1.0 - lambda) * p + lambda * q);
        });
        DiscreteDist::normalized(self.dim, coords, weights)
    }
}

/// Walks the union of two supports in order, calling `f(atom, p(atom), q(atom))`.
fn merge<F: FnMut(&[f64], f64, f64)>(p: &DiscreteDist, q: &DiscreteDist, mut f: F) {
    let (mut i, mut j) = (0, 0);
    while i < p.len() || j < q.len() {
        if j == q.len() {
            f(p.atom(i), p.weights[i], 0.0);
            i += 1;
        } else if i == p.len() {
            f(q.atom(j), 0.0, q.weights[j]);
            j += 1;
        } else {
            match cmp_points(p.atom(i), q.atom(j)) {
                Ordering::Less => {
                    f(p.atom(i), p.weights[i], 0.0);
                    i += 1;
                }
                Ordering::Greater => {
                    f(q.atom(j), 0.0, q.weights[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    f(p.atom(i), p.weights[i], q.weights[j]);
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

/// Total variation distance, half the L1 distance of the weight vectors.
pub fn tv_distance(p: &DiscreteDist, q: &DiscreteDist) -> f64 {
    let mut acc = 0.0;
    merge(p, q, |_, a, b| acc += (a - b).abs());
    (0.5 * acc).min(1.0)
}

/// Hellinger affinity `sum sqrt(p q)`.
pub fn hellinger_affinity(p: &DiscreteDist, q: &DiscreteDist) -> f64 {
    let mut acc = 0.0;
    merge(p, q, |_, a, b| acc += (a * b).sqrt());
    acc.min(1.0)
}

/// Hellinger distance `sqrt(sum (sqrt p - sqrt q)^2)`, in `[0, sqrt 2]`.
pub fn hellinger_distance(p: &DiscreteDist, q: &DiscreteDist) -> f64 {
    let mut acc = 0.0;
    merge(p, q, |_, a, b| {
        let d = a.sqrt() - b.sqrt();
        acc += d * d;
    });
    acc.sqrt()
}
