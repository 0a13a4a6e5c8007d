//! Privacy levels, channels and finite distributions.

mod binary;
mod discrete;
mod dist;

pub use binary::BinaryChannel;
pub use discrete::{audit_privacy, Audit, ChannelSpec, DiscreteChannel};
pub use dist::{hellinger_affinity, hellinger_distance, tv_distance, DiscreteDist};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when a probability vector is checked for summing to one.
pub const PROB_TOL: f64 = 1e-12;

/// Slack allowed when comparing an audited log-ratio against its budget.
pub const AUDIT_SLACK: f64 = 1e-9;

/// A privacy budget `alpha` together with the exponentials derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PrivacyLevel {
    alpha: f64,
    exp_alpha: f64,
    expm1: f64,
    z_factor: f64,
}

impl PrivacyLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::BadAlpha(alpha));
        }
        let expm1 = alpha.exp_m1();
        Ok(Self {
            alpha,
            exp_alpha: alpha.exp(),
            expm1,
            z_factor: (expm1 + 2.0) / expm1,
        })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn exp_alpha(&self) -> f64 {
        self.exp_alpha
    }

    /// `e^alpha - 1`.
    #[inline]
    pub fn expm1(&self) -> f64 {
        self.expm1
    }

    /// `(e^alpha + 1) / (e^alpha - 1)`, the ratio between the released
    /// magnitude and the sup norm of the representer.
    #[inline]
    pub fn z_factor(&self) -> f64 {
        self.z_factor
    }

    /// `n (e^alpha - 1)^2`.
    pub fn effective_sample_size(&self, n: f64) -> f64 {
        n * self.expm1 * self.expm1
    }
}

impl TryFrom<f64> for PrivacyLevel {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<PrivacyLevel> for f64 {
    fn from(level: PrivacyLevel) -> f64 {
        level.alpha
    }
}

/// Maps a distribution on the input alphabet to a distribution on the outputs.
pub trait Pushforward {
    fn pushforward(&self, p: &DiscreteDist) -> Result<DiscreteDist>;
}
