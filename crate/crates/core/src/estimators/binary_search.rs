use serde::Serialize;

use super::ThetaRange;
use crate::channels::BinaryChannel;
use crate::error::{invalid, Error, Result};

/// Likelihood-ratio threshold separating `Bernoulli(s)` from `Bernoulli(t)`:
/// `log((1-s)/(1-t)) / log((t/s)(1-s)/(1-t))`, with `G(s, s) = s`.
pub fn critical_value_g(s: f64, t: f64) -> Result<f64> {
    for (name, v) in [("s", s), ("t", t)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(invalid(name, format!("{v} not in (0, 1)")));
        }
    }
    Ok(g_unchecked(s, t))
}

#[inline]
fn g_unchecked(s: f64, t: f64) -> f64 {
    if s == t {
        return s;
    }
    let (s, t) = if s < t { (s, t) } else { (t, s) };
    let d = t - s;
    // log((1-s)/(1-t)) and log(t/s) without cancellation
    let num = (d / (1.0 - t)).ln_1p();
    let odds = (d / s).ln_1p();
    let g = num / (odds + num);
    g.clamp(s, t)
}

/// Monotone link between the functional and the success probability of the
/// released bit.
pub trait ThetaProbMap {
    /// Success probability of a distribution with functional value `theta`.
    fn prob(&self, theta: f64) -> f64;
    /// Largest functional value compatible with success probability `p`,
    /// clamped to the range.
    fn theta_at(&self, p: f64) -> f64;
    /// Magnitude of the released values.
    fn z0(&self) -> f64;
}

/// `p(theta) = (1 + theta / z0) / 2`, exact when the representer is unbiased.
#[derive(Debug, Clone, Copy)]
pub struct LinearProbMap {
    z0: f64,
    range: ThetaRange,
}

impl LinearProbMap {
    pub fn new(z0: f64, range: ThetaRange) -> Result<Self> {
        if !(z0.is_finite() && z0 > 0.0) {
            return Err(invalid("z0", format!("{z0} is not positive")));
        }
        if range.lo.abs() >= z0 || range.hi.abs() >= z0 {
            return Err(invalid("range", "functional values must stay below z0 in magnitude"));
        }
        Ok(Self { z0, range })
    }

    pub fn for_channel(channel: &BinaryChannel, range: ThetaRange) -> Result<Self> {
        Self::new(channel.z0(), range)
    }
}

impl ThetaProbMap for LinearProbMap {
    fn prob(&self, theta: f64) -> f64 {
        0.5 * (1.0 + theta / self.z0)
    }

    fn theta_at(&self, p: f64) -> f64 {
        self.range.project(self.z0 * (2.0 * p - 1.0))
    }

    fn z0(&self) -> f64 {
        self.z0
    }
}

/// Thresholds of the binary search estimator over the grid
/// `{lo + j delta : j = 1..N-1}`.
#[derive(Debug, Clone, Serialize)]
pub struct BinarySearchPlan {
    delta: f64,
    range: ThetaRange,
    /// Smallest `N` with `N delta > M`; zero when `delta = 0`.
    n_cells: usize,
    /// `c_1 <= ... <= c_{N-2}`.
    critical: Vec<f64>,
    z0: f64,
    p_lo: f64,
    p_hi: f64,
}

const MAX_CELLS: usize = 50_000_000;

/// Builds the plan for grid width `delta`.
pub fn build_plan(delta: f64, range: ThetaRange, map: &dyn ThetaProbMap) -> Result<BinarySearchPlan> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(invalid("delta", format!("{delta} is not a width")));
    }
    let m = range.width();
    let mut plan = BinarySearchPlan {
        delta,
        range,
        n_cells: 0,
        critical: Vec::new(),
        z0: map.z0(),
        p_lo: map.prob(range.lo),
        p_hi: map.prob(range.hi),
    };
    if delta == 0.0 {
        return Ok(plan);
    }
    let ratio = m / delta;
    if ratio >= MAX_CELLS as f64 {
        return Err(invalid("delta", format!("{delta} gives more than {MAX_CELLS} cells")));
    }
    let mut n = ratio.floor() as usize + 1;
    while n as f64 * delta <= m {
        n += 1;
    }
    while n > 1 && (n - 1) as f64 * delta > m {
        n -= 1;
    }
    plan.n_cells = n;
    if n <= 2 {
        return Ok(plan);
    }
    let mut critical = Vec::with_capacity(n - 2);
    let mut prev_c = f64::NEG_INFINITY;
    for j in 1..=(n - 2) {
        let a = range.lo + j as f64 * delta;
        let b = range.lo + (j + 1) as f64 * delta;
        let (pa, pb) = (map.prob(a), map.prob(b));
        if !(pa < pb && pa > 0.0 && pb < 1.0) {
            return Err(Error::NonMonotoneMap(a, b));
        }
        let c = g_unchecked(pa, pb);
        if c < prev_c {
            return Err(Error::NonMonotoneMap(a - delta, b));
        }
        prev_c = c;
        critical.push(c);
    }
    plan.critical = critical;
    Ok(plan)
}

impl BinarySearchPlan {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn range(&self) -> ThetaRange {
        self.range
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn critical_values(&self) -> &[f64] {
        &self.critical
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    /// Constant midpoint estimator (`N <= 2` or `delta = 0`).
    pub fn is_degenerate(&self) -> bool {
        self.n_cells <= 2
    }

    /// Possible outputs of the estimator.
    pub fn values(&self) -> Vec<f64> {
        if self.is_degenerate() {
            return vec![self.range.midpoint()];
        }
        (1..self.n_cells)
            .map(|j| self.range.lo + j as f64 * self.delta)
            .collect()
    }

    /// Estimate from the fraction `t` of released values equal to `+z0`.
    #[inline]
    pub fn estimate_from_fraction(&self, t: f64) -> f64 {
        if self.is_degenerate() {
            return self.range.midpoint();
        }
        let idx = self.critical.partition_point(|c| *c <= t);
        self.range.lo + (idx + 1) as f64 * self.delta
    }

    /// Estimate from the mean of the released values.
    pub fn estimate_from_mean(&self, zbar: f64) -> f64 {
        self.estimate_from_fraction(0.5 * (1.0 + zbar / self.z0))
    }

    /// Estimate from the released sample; every entry must be `+-z0`.
    pub fn estimate(&self, z: &[f64]) -> Result<f64> {
        if z.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut plus = 0usize;
        for &v in z {
            if v == self.z0 {
                plus += 1;
            } else if v != -self.z0 {
                return Err(Error::NotBinaryOutput(v));
            }
        }
        Ok(self.estimate_from_fraction(plus as f64 / z.len() as f64))
    }
}

/// Affine function of the sample mean that stays within `2 delta` of the
/// binary search estimate after projection.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AffineSurrogate {
    pub intercept: f64,
    pub slope: f64,
    pub bound: f64,
    range: ThetaRange,
}

impl AffineSurrogate {
    pub fn new(plan: &BinarySearchPlan, map: &dyn ThetaProbMap) -> Result<Self> {
        if plan.n_cells < 4 {
            return Err(Error::DegeneratePlan(plan.n_cells));
        }
        let c = plan.critical_values();
        let s0 = 0.5 * (plan.p_lo + c[0]);
        let t0 = 0.5 * (c[c.len() - 1] + plan.p_hi);
        let (f0, f1) = (map.theta_at(s0), map.theta_at(t0));
        // psi(t) = f0 + (t - s0) (f1 - f0) / (t0 - s0), with t = 1/2 + zbar / (2 z0)
        let k = (f1 - f0) / (t0 - s0);
        let z0 = plan.z0();
        Ok(Self {
            intercept: f0 + k * (0.5 - s0),
            slope: k / (2.0 * z0),
            bound: 2.0 * plan.delta(),
            range: plan.range(),
        })
    }

    #[inline]
    pub fn eval(&self, zbar: f64) -> f64 {
        self.intercept + self.slope * zbar
    }

    #[inline]
    pub fn projected(&self, zbar: f64) -> f64 {
        self.range.project(self.eval(zbar))
    }
}
