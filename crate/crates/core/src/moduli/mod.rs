//! Moduli of continuity: closed-form curves, brute force over finite
//! families, the lower-bound risk curve and inequality checks.

mod bounds;
mod brute;
mod checks;

pub use bounds::{contraction_check, lower_bound_curve, ContractionReport, LowerBoundConfig};
pub use brute::{
    brute_force_modulus, privatized_modulus, FamilyMember, FiniteFamily, Metric, Modulus,
    ModulusTable,
};
pub use checks::{
    condition_c_bound_check, homogeneity_check, linear_lower_bound_check, monotone_check,
    private_hellinger_check, sandwich_check, CheckOutcome,
};

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimators::{ThetaProbMap, ThetaRange};

/// Estimation problem behind a closed-form modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemTag {
    /// `E f` with `f` bounded.
    MomentBounded,
    /// `E f` over `E|f|^kappa <= L`.
    MomentHeavy { kappa: f64, bound: f64 },
    /// `p^(m)(x0)` over a Hölder class of smoothness `beta`.
    DensityDerivative { beta: f64, m: usize },
    /// `p(x0)` over an anisotropic Hölder class.
    Anisotropic { beta: Vec<f64> },
    /// Endpoint of `Unif[0, theta]`, `theta <= upper`.
    UniformEndpoint { upper: f64 },
}

impl ProblemTag {
    fn validate(&self) -> Result<()> {
        match self {
            ProblemTag::MomentBounded => Ok(()),
            ProblemTag::MomentHeavy { kappa, bound } => {
                if !(*kappa > 1.0 && kappa.is_finite()) || !(*bound > 0.0) {
                    return Err(invalid("kappa", "need kappa > 1 and a positive bound"));
                }
                Ok(())
            }
            ProblemTag::DensityDerivative { beta, m } => {
                if !(beta.is_finite() && *beta > *m as f64) {
                    return Err(invalid("beta", "must exceed m"));
                }
                Ok(())
            }
            ProblemTag::Anisotropic { beta } => {
                if beta.is_empty() || beta.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
                    return Err(invalid("beta", "need positive smoothness per axis"));
                }
                Ok(())
            }
            ProblemTag::UniformEndpoint { upper } => {
                if !(upper.is_finite() && *upper > 0.0) {
                    return Err(invalid("upper", "must be positive"));
                }
                Ok(())
            }
        }
    }

    /// Exponent of `eps` in the modulus for `metric`.
    pub fn exponent(&self, metric: Metric) -> f64 {
        let hell = metric == Metric::Hellinger;
        match self {
            ProblemTag::MomentBounded => 1.0,
            ProblemTag::MomentHeavy { kappa, .. } => {
                let tv = (kappa - 1.0) / kappa;
                if hell {
                    (2.0 * tv).min(1.0)
                } else {
                    tv
                }
            }
            ProblemTag::DensityDerivative { beta, m } => {
                let m = *m as f64;
                if hell {
                    (beta - m) / (beta + 0.5)
                } else {
                    (beta - m) / (beta + 1.0)
                }
            }
            ProblemTag::Anisotropic { beta } => {
                let rbar: f64 = beta.iter().map(|b| 1.0 / b).sum();
                if hell {
                    1.0 / (1.0 + rbar / 2.0)
                } else {
                    1.0 / (1.0 + rbar)
                }
            }
            ProblemTag::UniformEndpoint { .. } => {
                if hell {
                    2.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Leading constant where it is known in closed form, else 1.
    pub fn default_constant(&self, metric: Metric) -> f64 {
        match (self, metric) {
            (ProblemTag::MomentHeavy { kappa, bound }, Metric::Tv) => (bound / 2.0).powf(1.0 / kappa),
            (ProblemTag::UniformEndpoint { upper }, _) => *upper,
            _ => 1.0,
        }
    }
}

impl FromStr for ProblemTag {
    type Err = Error;

    /// Parses `name` or `name:key=value,key=value`, e.g.
    /// `moment_heavy:kappa=2,bound=2` or `anisotropic:beta=0.5/1`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = std::collections::HashMap::new();
        for kv in rest.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| invalid("problem", format!("`{kv}` is not key=value")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let num = |key: &str, default: Option<f64>| -> Result<f64> {
            match params.get(key) {
                Some(v) => v
                    .parse::<f64>()
                    .map_err(|_| invalid("problem", format!("`{key}={v}` is not a number"))),
                None => default.ok_or_else(|| invalid("problem", format!("missing `{key}`"))),
            }
        };
        let tag = match name.trim() {
            "moment_bounded" => ProblemTag::MomentBounded,
            "moment_heavy" => ProblemTag::MomentHeavy {
                kappa: num("kappa", None)?,
                bound: num("bound", Some(1.0))?,
            },
            "density_derivative" => ProblemTag::DensityDerivative {
                beta: num("beta", None)?,
                m: num("m", Some(0.0))? as usize,
            },
            "anisotropic" => {
                let raw = params
                    .get("beta")
                    .ok_or_else(|| invalid("problem", "missing `beta`"))?;
                let beta = raw
                    .split('/')
                    .map(|v| v.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| invalid("problem", format!("bad beta list `{raw}`")))?;
                ProblemTag::Anisotropic { beta }
            }
            "uniform_endpoint" => ProblemTag::UniformEndpoint {
                upper: num("upper", Some(1.0))?,
            },
            other => return Err(invalid("problem", format!("unknown problem `{other}`"))),
        };
        tag.validate()?;
        Ok(tag)
    }
}

/// `omega(eps) = constant * eps^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusCurve {
    pub problem: ProblemTag,
    pub metric: Metric,
    pub exponent: f64,
    pub constant: f64,
}

impl ModulusCurve {
    pub fn new(problem: ProblemTag, metric: Metric) -> Result<Self> {
        problem.validate()?;
        let exponent = problem.exponent(metric);
        let constant = problem.default_constant(metric);
        Ok(Self {
            problem,
            metric,
            exponent,
            constant,
        })
    }

    pub fn with_constant(mut self, constant: f64) -> Result<Self> {
        if !(constant.is_finite() && constant > 0.0) {
            return Err(invalid("constant", "must be positive"));
        }
        self.constant = constant;
        Ok(self)
    }
}

pub fn analytic_modulus(curve: &ModulusCurve, eps: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(invalid("eps", format!("{eps} is negative")));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(curve.constant * eps.powf(curve.exponent))
}

/// Exact moduli of the endpoint of `Unif[0, theta]`, `0 < theta <= upper`:
/// `upper * eps` in total variation and `upper * eps^2 (1 - eps^2 / 4)` in
/// Hellinger distance.
pub fn uniform_endpoint_modulus(metric: Metric, eps: f64, upper: f64) -> f64 {
    match metric {
        Metric::Tv => upper * eps.clamp(0.0, 1.0),
        Metric::Hellinger => {
            let e2 = eps.clamp(0.0, 2f64.sqrt()).powi(2);
            upper * e2 * (1.0 - e2 / 4.0)
        }
    }
}

/// Hellinger modulus of the released bit: the widest gap `theta1 - theta0`
/// inside `range` whose success probabilities under `map` are within `eps`
/// in Hellinger distance. `grid` left endpoints are scanned and the right
/// endpoint is found by bisection.
pub fn binary_channel_modulus(
    map: &dyn ThetaProbMap,
    range: ThetaRange,
    eps: f64,
    grid: usize,
) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(invalid("eps", format!("{eps} is negative")));
    }
    if grid < 2 {
        return Err(invalid("grid", "needs at least two points"));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let dist = |a: f64, b: f64| {
        let (pa, pb) = (map.prob(a), map.prob(b));
        let d1 = pa.sqrt() - pb.sqrt();
        let d0 = (1.0 - pa).sqrt() - (1.0 - pb).sqrt();
        (d1 * d1 + d0 * d0).sqrt()
    };
    let mut best = 0.0f64;
    for i in 0..grid {
        let lo = range.lo + range.width() * i as f64 / (grid - 1) as f64;
        if dist(lo, range.hi) <= eps {
            best = best.max(range.hi - lo);
            continue;
        }
        let (mut a, mut b) = (lo, range.hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if dist(lo, mid) <= eps {
                a = mid;
            } else {
                b = mid;
            }
        }
        best = best.max(a - lo);
    }
    Ok(best)
}
