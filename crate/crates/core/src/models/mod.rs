//! Data generating models, worst-case pairs and loss functions.

mod anisotropic;
pub mod bump;
mod holder;
mod loss;
mod moment;
mod sampler;
mod uniform;

pub use anisotropic::AnisotropicDensity;
pub use holder::HolderDensity;
pub use loss::LossFn;
pub use moment::{DiscreteModel, MomentCase, MomentPair};
pub use sampler::GridSampler;
pub use uniform::UniformModel;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channels::DiscreteDist;
use crate::error::{invalid, Result};
use crate::estimators::ThetaRange;
use crate::representers::Representer;
use crate::rng::CounterRng;

/// A distribution together with the value of the target functional.
pub trait StatModel: Send + Sync + fmt::Debug {
    fn tag(&self) -> &'static str;

    /// Dimension of one observation.
    fn dim(&self) -> usize;

    /// Value of the functional at this distribution.
    fn theta(&self) -> f64;

    /// Range of the functional over the model class.
    fn theta_range(&self) -> ThetaRange;

    /// Writes one observation into `out` (length [`StatModel::dim`]).
    fn sample(&self, rng: &mut CounterRng, out: &mut [f64]);

    /// `E[ell(X)]`, by quadrature for continuous models.
    fn expectation(&self, rep: &Representer) -> Result<f64>;

    /// Finite approximation with roughly `resolution` cells per axis.
    fn discretize(&self, resolution: usize) -> Result<DiscreteDist>;
}

/// Serializable model description used by experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `Unif[0, theta]` inside the class with endpoints up to `upper`.
    Uniform { theta: f64, upper: f64 },
    /// Smooth bump density; with `perturbation` set, the perturbed member of
    /// the two-point construction at that bandwidth.
    HolderDensity {
        smoothness: f64,
        holder_constant: f64,
        #[serde(default)]
        at: f64,
        #[serde(default)]
        derivative: usize,
        #[serde(default)]
        perturbation: Option<f64>,
    },
    /// Two-point moment construction. When `eps` is absent the contamination
    /// level follows the representer bandwidth, `eps = (L / 4) h^kappa`.
    MomentPair {
        case: MomentCase,
        moment_exponent: f64,
        moment_bound: f64,
        #[serde(default = "default_power")]
        power: i32,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        eps: Option<f64>,
        /// Simulate from the contaminated member instead of the point mass.
        #[serde(default = "default_true")]
        contaminated: bool,
    },
    /// Gaussian base density in `R^d` for the anisotropic class.
    Anisotropic {
        smoothness: Vec<f64>,
        holder_constant: Vec<f64>,
        at: Vec<f64>,
    },
}

fn default_power() -> i32 {
    1
}

fn default_delta() -> f64 {
    1e-6
}

fn default_true() -> bool {
    true
}

impl ModelSpec {
    /// Whether the instantiated model depends on the representer bandwidth.
    pub fn tracks_bandwidth(&self) -> bool {
        matches!(self, ModelSpec::MomentPair { eps: None, .. })
    }

    /// Builds the model; `bandwidth` is only consulted by moving pairs.
    pub fn build(&self, bandwidth: &[f64]) -> Result<Arc<dyn StatModel>> {
        Ok(match self {
            ModelSpec::Uniform { theta, upper } => Arc::new(UniformModel::new(*theta, *upper)?),
            ModelSpec::HolderDensity {
                smoothness,
                holder_constant,
                at,
                derivative,
                perturbation,
            } => {
                let base = HolderDensity::base(*smoothness, *holder_constant, *at, *derivative)?;
                match perturbation {
                    Some(h) => Arc::new(base.perturbed(*h)?),
                    None => Arc::new(base),
                }
            }
            ModelSpec::MomentPair {
                case,
                moment_exponent,
                moment_bound,
                power,
                delta,
                eps,
                contaminated,
            } => {
                let eps = match eps {
                    Some(e) => *e,
                    None => {
                        let h = *bandwidth
                            .first()
                            .ok_or_else(|| invalid("bandwidth", "moving pair needs h"))?;
                        0.25 * moment_bound * h.powf(*moment_exponent)
                    }
                };
                let pair =
                    MomentPair::new(*case, *power, *moment_exponent, *moment_bound, *delta, eps)?;
                let (p0, p1) = pair.models();
                Arc::new(if *contaminated { p1 } else { p0 })
            }
            ModelSpec::Anisotropic {
                smoothness,
                holder_constant,
                at,
            } => Arc::new(AnisotropicDensity::new(
                smoothness.clone(),
                holder_constant.clone(),
                at.clone(),
            )?),
        })
    }
}

/// Simpson quadrature of `f` against a box, splitting each axis evenly.
pub(crate) fn box_quadrature<F: Fn(&[f64]) -> f64>(
    f: F,
    bounds: &[(f64, f64)],
    intervals: usize,
) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let d = bounds.len();
    let weights: Vec<f64> = (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect();
    let steps: Vec<f64> = bounds.iter().map(|(a, b)| (b - a) / n as f64).collect();
    if steps.iter().any(|s| !(*s > 0.0)) {
        return 0.0;
    }
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut acc = 0.0;
    loop {
        let mut w = 1.0;
        for j in 0..d {
            x[j] = bounds[j].0 + steps[j] * idx[j] as f64;
            w *= weights[idx[j]];
        }
        acc += w * f(&x);
        let mut j = 0;
        loop {
            if j == d {
                let scale: f64 = steps.iter().map(|s| s / 3.0).product();
                return acc * scale;
            }
            idx[j] += 1;
            if idx[j] <= n {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Intersection of the model's box with the representer's declared support.
pub(crate) fn clip_to_support(bounds: &[(f64, f64)], rep: &Representer) -> Vec<(f64, f64)> {
    match rep.support() {
        Some(s) if s.dim() == bounds.len() => bounds
            .iter()
            .zip(&s.bounds)
            .map(|((a, b), (c, d))| (a.max(*c), b.min(*d)))
            .collect(),
        _ => bounds.to_vec(),
    }
}

/// Cell-midpoint discretization of a density on a box.
pub(crate) fn discretize_density<F: Fn(&[f64]) -> f64>(
    density: F,
    bounds: &[(f64, f64)],
    resolution: usize,
) -> Result<DiscreteDist> {
    if resolution == 0 {
        return Err(invalid("resolution", "must be positive"));
    }
    let d = bounds.len();
    let total = resolution.checked_pow(d as u32).unwrap_or(usize::MAX);
    if total > 5_000_000 {
        return Err(invalid("resolution", "too many cells"));
    }
    let widths: Vec<f64> = bounds.iter().map(|(a, b)| (b - a) / resolution as f64).collect();
    let mut atoms = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut x = vec![0.0; d];
    for flat in 0..total {
        let mut rest = flat;
        for j in 0..d {
            let i = rest % resolution;
            rest /= resolution;
            x[j] = bounds[j].0 + widths[j] * (i as f64 + 0.5);
        }
        let w = density(&x).max(0.0);
        if w > 0.0 {
            atoms.push(x.clone());
            weights.push(w);
        }
    }
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        return Err(invalid("density", "no mass on the grid"));
    }
    weights.iter_mut().for_each(|w| *w /= sum);
    DiscreteDist::new(atoms, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_of_polynomials() {
        let v = box_quadrature(|x| x[0] * x[0], &[(0.0, 1.0)], 10);
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        let v = box_quadrature(|x| x[0] * x[1] * x[1], &[(0.0, 1.0), (0.0, 2.0)], 10);
        assert!((v - 0.5 * 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn spec_json() {
        let s: ModelSpec = serde_json::from_str(r#"{"kind":"uniform","theta":1,"upper":1}"#).unwrap();
        assert_eq!(s, ModelSpec::Uniform { theta: 1.0, upper: 1.0 });
        let s: ModelSpec = serde_json::from_str(
            r#"{"kind":"holder_density","smoothness":1,"holder_constant":1}"#,
        )
        .unwrap();
        assert!(matches!(s, ModelSpec::HolderDensity { derivative: 0, perturbation: None, .. }));
        assert!(serde_json::from_str::<ModelSpec>(r#"{"kind":"uniform","theta":1}"#).is_err());
    }
}
