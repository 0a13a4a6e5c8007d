//! Projected sample mean, binary search estimator and its affine surrogate.

mod binary_search;

pub use binary_search::{
    build_plan, critical_value_g, AffineSurrogate, BinarySearchPlan, LinearProbMap, ThetaProbMap,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Closed range `[lo, hi]` of the functional over the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRange {
    pub lo: f64,
    pub hi: f64,
}

impl ThetaRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid("range", format!("[{lo}, {hi}] is not a finite interval")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn project(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

/// `project(mean(z) + shift)` onto `range`.
pub fn sample_mean_estimate(z: &[f64], shift: f64, range: ThetaRange) -> Result<f64> {
    if z.is_empty() {
        return Err(Error::EmptySample);
    }
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    Ok(range.project(mean + shift))
}

/// Smallest admissible constant `sqrt(2 ln(2a)) + 1` for a loss with doubling
/// constant `a`.
pub fn tuning_constant(a_loss: f64) -> Result<f64> {
    if !(a_loss.is_finite() && a_loss > 1.0) {
        return Err(invalid("a_loss", format!("{a_loss} must exceed 1")));
    }
    Ok((2.0 * (2.0 * a_loss).ln()).sqrt() + 1.0)
}

/// Grid width `C^2 * modulus` of the binary search estimator.
pub fn delta_tuning(modulus_at_root_n: f64, a_loss: f64) -> Result<f64> {
    let c = tuning_constant(a_loss)?;
    if !(modulus_at_root_n.is_finite() && modulus_at_root_n >= 0.0) {
        return Err(invalid("modulus", format!("{modulus_at_root_n} is not a modulus value")));
    }
    Ok(c * c * modulus_at_root_n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection() {
        let r = ThetaRange::new(0.0, 1.0).unwrap();
        assert_eq!(sample_mean_estimate(&[0.2, 0.4], 0.0, r).unwrap(), 0.30000000000000004);
        assert_eq!(sample_mean_estimate(&[6.0], 0.0, r).unwrap(), 1.0);
        assert_eq!(sample_mean_estimate(&[-3.0], 0.5, r).unwrap(), 0.0);
        assert!(matches!(sample_mean_estimate(&[], 0.0, r), Err(Error::EmptySample)));
        assert!(ThetaRange::new(1.0, 1.0).is_err());
    }

    #[test]
    fn tuning() {
        let c = tuning_constant(2.25).unwrap();
        assert!((c - ((2.0 * 4.5f64.ln()).sqrt() + 1.0)).abs() < 1e-15);
        assert!((c - 2.7344).abs() < 1e-4);
        assert_eq!(delta_tuning(0.0, 2.25).unwrap(), 0.0);
        let d1 = delta_tuning(0.01, 2.25).unwrap();
        let d2 = delta_tuning(0.03, 2.25).unwrap();
        assert!((d2 - 3.0 * d1).abs() < 1e-15);
        assert!(delta_tuning(0.1, 1.0).is_err());
        assert!(delta_tuning(-0.1, 2.0).is_err());
    }
}
