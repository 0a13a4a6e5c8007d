use serde::{Deserialize, Serialize};

use super::{build_kernel, Domain, PolyKernel, Representer};
use crate::channels::PrivacyLevel;
use crate::error::{invalid, Error, Result};
use crate::models::StatModel;
use crate::numeric::factorial;

/// Sup-norm and bias bounds of a representer family indexed by `h in (0, h0]^k`:
/// `||ell_h|| <= d0 prod h_j^-s_j` and `bias <= d0 mean_j h_j^t_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionC {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub d0: f64,
    pub h0: f64,
}

impl ConditionC {
    pub fn new(s: Vec<f64>, t: Vec<f64>, d0: f64, h0: f64) -> Result<Self> {
        if s.is_empty() || s.len() != t.len() {
            return Err(Error::DimensionMismatch {
                expected: s.len().max(1),
                got: t.len(),
            });
        }
        if s.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("s", "entries must be finite and non-negative"));
        }
        if t.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("t", "entries must be finite and positive"));
        }
        if !(d0.is_finite() && d0 > 0.0) {
            return Err(invalid("d0", format!("{d0} is not positive")));
        }
        if !(h0 > 0.0 && h0 <= 1.0) {
            return Err(invalid("h0", format!("{h0} not in (0, 1]")));
        }
        Ok(Self { s, t, d0, h0 })
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }

    /// `sum_j s_j / t_j`.
    pub fn rbar(&self) -> f64 {
        self.s.iter().zip(&self.t).map(|(s, t)| s / t).sum()
    }

    /// Exponent of the private rate `eps^(1 / (1 + rbar))`.
    pub fn rate_exponent(&self) -> f64 {
        1.0 / (1.0 + self.rbar())
    }

    pub fn sup_bound(&self, h: &[f64]) -> f64 {
        self.d0 * h.iter().zip(&self.s).map(|(h, s)| h.powf(-s)).product::<f64>()
    }

    pub fn bias_bound(&self, h: &[f64]) -> f64 {
        self.d0 * h.iter().zip(&self.t).map(|(h, t)| h.powf(*t)).sum::<f64>() / self.k() as f64
    }
}

/// Serializable description of a representer family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `f(x) 1{|f(x)| <= 1/h}` with `f(x) = x^power`, for classes with
    /// `E|f|^moment_exponent <= moment_bound`.
    TruncatedMoment {
        moment_exponent: f64,
        moment_bound: f64,
        #[serde(default = "default_power")]
        power: i32,
    },
    /// Scaled `derivative`-th derivative of a polynomial kernel centred at `at`.
    DerivativeKernel {
        derivative: usize,
        smoothness: f64,
        holder_constant: f64,
        #[serde(default)]
        at: f64,
    },
    /// Product of one-dimensional kernels with per-axis bandwidths.
    ProductKernel {
        smoothness: Vec<f64>,
        holder_constant: Vec<f64>,
        at: Vec<f64>,
    },
    /// `ell(x) = 2x` on `[0, upper]`, unbiased for the endpoint.
    UniformEndpoint {
        upper: f64,
        #[serde(default = "default_bias_exponent")]
        bias_exponent: f64,
    },
}

fn default_power() -> i32 {
    1
}

fn default_bias_exponent() -> f64 {
    1.0
}

/// A validated family together with its bound constants.
#[derive(Debug, Clone)]
pub struct RepresenterFamily {
    spec: FamilySpec,
    condition: ConditionC,
    kernel: Option<PolyKernel>,
}

impl RepresenterFamily {
    pub fn new(spec: FamilySpec) -> Result<Self> {
        let (condition, kernel) = match &spec {
            FamilySpec::TruncatedMoment {
                moment_exponent,
                moment_bound,
                ..
            } => {
                if !(moment_exponent.is_finite() && *moment_exponent > 1.0) {
                    return Err(invalid("moment_exponent", "must exceed 1"));
                }
                if !(moment_bound.is_finite() && *moment_bound > 0.0) {
                    return Err(invalid("moment_bound", "must be positive"));
                }
                let c = ConditionC::new(
                    vec![1.0],
                    vec![moment_exponent - 1.0],
                    moment_bound.max(1.0),
                    1.0,
                )?;
                (c, None)
            }
            FamilySpec::DerivativeKernel {
                derivative,
                smoothness,
                holder_constant,
                at,
            } => {
                let m = *derivative;
                if !(smoothness.is_finite() && *smoothness > m as f64) {
                    return Err(invalid(
                        "smoothness",
                        format!("{smoothness} must exceed the derivative order {m}"),
                    ));
                }
                if !(holder_constant.is_finite() && *holder_constant > 0.0) {
                    return Err(invalid("holder_constant", "must be positive"));
                }
                if !at.is_finite() {
                    return Err(invalid("at", "must be finite"));
                }
                let b = smoothness.floor() as usize;
                let kernel = build_kernel(b - m, m)?;
                let c1 = kernel.abs_moment(smoothness - m as f64);
                let d0 = kernel
                    .sup_norm(m)
                    .max(c1 * holder_constant / factorial(b - m));
                let c = ConditionC::new(
                    vec![(m + 1) as f64],
                    vec![smoothness - m as f64],
                    d0,
                    1.0,
                )?;
                (c, Some(kernel))
            }
            FamilySpec::ProductKernel {
                smoothness,
                holder_constant,
                at,
            } => {
                let d = smoothness.len();
                if d == 0 {
                    return Err(invalid("smoothness", "needs at least one axis"));
                }
                for len in [holder_constant.len(), at.len()] {
                    if len != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: len,
                        });
                    }
                }
                if smoothness.iter().any(|b| !(*b > 0.0 && *b <= 1.0)) {
                    return Err(invalid("smoothness", "entries must lie in (0, 1]"));
                }
                if holder_constant.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                    return Err(invalid("holder_constant", "entries must be positive"));
                }
                let kernel = build_kernel(0, 0)?;
                let sup = kernel.sup_norm(0);
                let mut d0 = sup.powi(d as i32).max(sup);
                for (b, l) in smoothness.iter().zip(holder_constant) {
                    d0 = d0.max(d as f64 * l * kernel.abs_moment(*b));
                }
                let c = ConditionC::new(vec![1.0; d], smoothness.clone(), d0, 1.0)?;
                (c, Some(kernel))
            }
            FamilySpec::UniformEndpoint {
                upper,
                bias_exponent,
            } => {
                if !(upper.is_finite() && *upper > 0.0) {
                    return Err(invalid("upper", "must be positive"));
                }
                let c = ConditionC::new(vec![0.0], vec![*bias_exponent], 2.0 * upper, 1.0)?;
                (c, None)
            }
        };
        Ok(Self {
            spec,
            condition,
            kernel,
        })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn condition(&self) -> &ConditionC {
        &self.condition
    }

    pub fn kernel(&self) -> Option<&PolyKernel> {
        self.kernel.as_ref()
    }

    /// Dimension of the sample space the representers act on.
    pub fn input_dim(&self) -> usize {
        match &self.spec {
            FamilySpec::ProductKernel { smoothness, .. } => smoothness.len(),
            _ => 1,
        }
    }

    /// Member of the family at bandwidth vector `h`.
    pub fn instantiate(&self, h: &[f64]) -> Result<Representer> {
        let k = self.condition.k();
        if h.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: h.len(),
            });
        }
        if h.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("h", "bandwidths must be positive"));
        }
        let rep = match &self.spec {
            FamilySpec::TruncatedMoment { power, .. } => {
                let power = *power;
                let cap = 1.0 / h[0];
                Representer::scalar(
                    move |x| {
                        let v = x.powi(power);
                        if v.abs() <= cap {
                            v
                        } else {
                            0.0
                        }
                    },
                    cap,
                    Domain::real_line(),
                )?
            }
            FamilySpec::DerivativeKernel { derivative, at, .. } => {
                let kernel = self.kernel.as_ref().expect("kernel family");
                let m = *derivative;
                let coeffs = kernel.derivative_coefficients(m);
                let (h, x0) = (h[0], *at);
                let scale = h.powi(-(m as i32 + 1));
                let sup = kernel.sup_norm(m) * scale;
                Representer::scalar(
                    move |x| {
                        let u = (x - x0) / h;
                        if u.abs() <= 1.0 {
                            scale * crate::numeric::poly_eval(&coeffs, u)
                        } else {
                            0.0
                        }
                    },
                    sup,
                    Domain::real_line(),
                )?
                .with_support(Domain::interval(x0 - h, x0 + h))
            }
            FamilySpec::ProductKernel { at, .. } => {
                if h.iter().any(|v| *v > 1.0) {
                    return Err(invalid("h", "product kernel bandwidths must be at most 1"));
                }
                let kernel = self.kernel.clone().expect("kernel family");
                let sup = kernel.sup_norm(0).powi(k as i32) / h.iter().product::<f64>();
                let (h, x0) = (h.to_vec(), at.clone());
                let support =
                    Domain::product(h.iter().zip(&x0).map(|(h, c)| (c - h, c + h)).collect());
                Representer::new(
                    move |x: &[f64]| {
                        let mut acc = 1.0;
                        for j in 0..h.len() {
                            acc *= kernel.eval((x[j] - x0[j]) / h[j]) / h[j];
                            if acc == 0.0 {
                                break;
                            }
                        }
                        acc
                    },
                    sup,
                    Domain::euclidean(k),
                )?
                .with_support(support)
            }
            FamilySpec::UniformEndpoint { upper, .. } => {
                Representer::scalar(|x| 2.0 * x, 2.0 * upper, Domain::interval(0.0, *upper))?
            }
        };
        Ok(rep.with_condition(self.condition.clone()))
    }
}

/// `f(x) 1{|f(x)| <= 1/h}`; the bias of this member over the class
/// `E|f|^kappa <= l` is at most `l h^(kappa - 1)`.
pub fn truncated_moment<F>(f: F, kappa: f64, l: f64, h: f64) -> Result<Representer>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid("h", format!("{h} is not positive")));
    }
    if !(kappa > 1.0) || !(l > 0.0) {
        return Err(invalid("kappa", "need kappa > 1 and a positive moment bound"));
    }
    let cap = 1.0 / h;
    let rep = Representer::scalar(
        move |x| {
            let v = f(x);
            if v.abs() <= cap {
                v
            } else {
                0.0
            }
        },
        cap,
        Domain::real_line(),
    )?;
    Ok(rep.with_condition(ConditionC::new(vec![1.0], vec![kappa - 1.0], l.max(1.0), 1.0)?))
}

/// Kernel representer for the `m`-th derivative of a density at `x0`.
pub fn derivative_kernel(m: usize, beta: f64, l: f64, x0: f64, h: f64) -> Result<Representer> {
    RepresenterFamily::new(FamilySpec::DerivativeKernel {
        derivative: m,
        smoothness: beta,
        holder_constant: l,
        at: x0,
    })?
    .instantiate(&[h])
}

/// Separable product kernel for a density value at `x0` in `R^d`.
pub fn product_kernel(
    d: usize,
    beta: &[f64],
    l: &[f64],
    x0: &[f64],
    h: &[f64],
) -> Result<Representer> {
    for len in [beta.len(), l.len(), x0.len(), h.len()] {
        if len != d {
            return Err(Error::DimensionMismatch { expected: d, got: len });
        }
    }
    RepresenterFamily::new(FamilySpec::ProductKernel {
        smoothness: beta.to_vec(),
        holder_constant: l.to_vec(),
        at: x0.to_vec(),
    })?
    .instantiate(h)
}

/// `ell(x) = 2x` on `[0, upper]`.
pub fn uniform_endpoint_representer(upper: f64) -> Result<Representer> {
    RepresenterFamily::new(FamilySpec::UniformEndpoint {
        upper,
        bias_exponent: 1.0,
    })?
    .instantiate(&[1.0])
}

/// Selected bandwidths; `clamped` is set when a component that matters
/// (`s_j > 0`) had to be cut back to `h0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    pub h: Vec<f64>,
    pub clamped: bool,
}

/// `h_j = (z_factor / sqrt n)^(1 / (t_j (1 + rbar)))`, capped at `h0`.
pub fn select_bandwidth(condition: &ConditionC, n: u64, level: PrivacyLevel) -> Bandwidth {
    let base = level.z_factor() / (n.max(1) as f64).sqrt();
    let rbar = condition.rbar();
    let mut clamped = false;
    let h = condition
        .t
        .iter()
        .zip(&condition.s)
        .map(|(t, s)| {
            let raw = base.powf(1.0 / (t * (1.0 + rbar)));
            if raw > condition.h0 {
                if *s > 0.0 {
                    clamped = true;
                }
                condition.h0
            } else {
                raw
            }
        })
        .collect();
    Bandwidth { h, clamped }
}

/// One bandwidth of a [`ConditionReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ConditionRow {
    pub h: Vec<f64>,
    pub sup_norm: f64,
    pub sup_bound: f64,
    pub max_bias: f64,
    pub bias_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub rows: Vec<ConditionRow>,
    pub worst_sup_ratio: f64,
    pub worst_bias_ratio: f64,
    pub passed: bool,
}

/// Checks the sup-norm and bias bounds of `family` on the given test models
/// and bandwidths.
pub fn verify_condition_c(
    family: &RepresenterFamily,
    models: &[&dyn StatModel],
    hs: &[Vec<f64>],
) -> Result<ConditionReport> {
    let cond = family.condition();
    let mut rows = Vec::with_capacity(hs.len());
    let (mut worst_sup, mut worst_bias) = (0.0f64, 0.0f64);
    for h in hs {
        let rep = family.instantiate(h)?;
        let mut max_bias = 0.0f64;
        for model in models {
            let bias = (model.expectation(&rep)? - model.theta()).abs();
            max_bias = max_bias.max(bias);
        }
        let sup_bound = cond.sup_bound(h);
        let bias_bound = cond.bias_bound(h);
        worst_sup = worst_sup.max(rep.sup_norm() / sup_bound);
        worst_bias = worst_bias.max(max_bias / bias_bound);
        rows.push(ConditionRow {
            h: h.clone(),
            sup_norm: rep.sup_norm(),
            sup_bound,
            max_bias,
            bias_bound,
        });
    }
    Ok(ConditionReport {
        rows,
        worst_sup_ratio: worst_sup,
        worst_bias_ratio: worst_bias,
        passed: worst_sup <= 1.0 + 1e-12 && worst_bias <= 1.0 + 1e-9,
    })
}
