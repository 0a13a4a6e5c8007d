//! Bounded representers, their bias families and bandwidth selection.

mod family;
mod kernel;

pub use family::{
    derivative_kernel, product_kernel, select_bandwidth, truncated_moment,
    uniform_endpoint_representer, verify_condition_c, Bandwidth, ConditionC, ConditionReport,
    ConditionRow, FamilySpec, RepresenterFamily,
};
pub use kernel::{build_kernel, PolyKernel};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channels::DiscreteDist;
use crate::error::{Error, Result};

/// Relative slack when an evaluation is compared to the certified sup norm.
const SUP_SLACK: f64 = 1e-9;

/// Axis-aligned box in `R^d`; bounds may be infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub bounds: Vec<(f64, f64)>,
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self {
            bounds: vec![(lo, hi)],
        }
    }

    pub fn real_line() -> Self {
        Self::interval(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn euclidean(d: usize) -> Self {
        Self {
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); d],
        }
    }

    pub fn product(bounds: Vec<(f64, f64)>) -> Self {
        Self { bounds }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.bounds.len()
            && x.iter().zip(&self.bounds).all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }
}

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A bounded function `ell` together with a caller-certified bound on `|ell|`.
#[derive(Clone)]
pub struct Representer {
    eval: EvalFn,
    sup_norm: f64,
    domain: Domain,
    support: Option<Domain>,
    condition: Option<ConditionC>,
}

impl fmt::Debug for Representer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Representer")
            .field("sup_norm", &self.sup_norm)
            .field("domain", &self.domain)
            .field("support", &self.support)
            .field("condition", &self.condition)
            .finish_non_exhaustive()
    }
}

impl Representer {
    pub fn new<F>(eval: F, sup_norm: f64, domain: Domain) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if !(sup_norm.is_finite() && sup_norm > 0.0) {
            return Err(Error::BadSupNorm(sup_norm));
        }
        Ok(Self {
            eval: Arc::new(eval),
            sup_norm,
            domain,
            support: None,
            condition: None,
        })
    }

    /// Representer on a subset of the real line.
    pub fn scalar<F>(eval: F, sup_norm: f64, domain: Domain) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if domain.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: domain.dim(),
            });
        }
        Self::new(move |x: &[f64]| eval(x[0]), sup_norm, domain)
    }

    pub fn with_condition(mut self, condition: ConditionC) -> Self {
        self.condition = Some(condition);
        self
    }

    /// Declares that `ell` vanishes outside `support`.
    pub fn with_support(mut self, support: Domain) -> Self {
        self.support = Some(support);
        self
    }

    /// Box outside of which `ell` is zero, if known.
    pub fn support(&self) -> Option<&Domain> {
        self.support.as_ref()
    }

    pub fn condition(&self) -> Option<&ConditionC> {
        self.condition.as_ref()
    }

    #[inline]
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Unchecked evaluation.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Evaluation that rejects points outside the domain and values above the
    /// certified bound.
    pub fn try_eval(&self, x: &[f64]) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain(x.to_vec()));
        }
        let value = self.eval(x);
        if !(value.abs() <= self.sup_norm * (1.0 + SUP_SLACK)) {
            return Err(Error::SupNormViolation {
                value,
                sup_norm: self.sup_norm,
            });
        }
        Ok(value)
    }

    /// `E_p[ell]` over a finite distribution.
    pub fn expectation(&self, p: &DiscreteDist) -> Result<f64> {
        let mut acc = 0.0;
        for (x, w) in p.iter() {
            acc += w * self.try_eval(x)?;
        }
        Ok(acc)
    }

    /// Largest `|ell|` observed on `points`; used to spot-check the bound.
    pub fn observed_sup(&self, points: &[Vec<f64>]) -> f64 {
        points.iter().map(|x| self.eval(x).abs()).fold(0.0, f64::max)
    }
}
