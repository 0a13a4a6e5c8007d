use rand::Rng;

use super::StatModel;
use crate::channels::DiscreteDist;
use crate::error::{invalid, Result};
use crate::estimators::ThetaRange;
use crate::numeric::simpson;
use crate::representers::Representer;
use crate::rng::CounterRng;

/// `Unif[0, theta]` with the functional `theta` and endpoints in `(0, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformModel {
    theta: f64,
    upper: f64,
}

impl UniformModel {
    pub fn new(theta: f64, upper: f64) -> Result<Self> {
        if !(upper.is_finite() && upper > 0.0) {
            return Err(invalid("upper", format!("{upper} is not positive")));
        }
        if !(theta > 0.0 && theta <= upper) {
            return Err(invalid("theta", format!("{theta} is outside (0, {upper}]")));
        }
        Ok(Self { theta, upper })
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }
}

impl StatModel for UniformModel {
    fn tag(&self) -> &'static str {
        "uniform"
    }

    fn dim(&self) -> usize {
        1
    }

    fn theta(&self) -> f64 {
        self.theta
    }

    fn theta_range(&self) -> ThetaRange {
        ThetaRange {
            lo: 0.0,
            hi: self.upper,
        }
    }

    #[inline]
    fn sample(&self, rng: &mut CounterRng, out: &mut [f64]) {
        out[0] = self.theta * rng.random::<f64>();
    }

    fn expectation(&self, rep: &Representer) -> Result<f64> {
        rep.try_eval(&[0.0])?;
        rep.try_eval(&[self.theta])?;
        Ok(simpson(|x| rep.eval(&[x]), 0.0, self.theta, 4096) / self.theta)
    }

    /// `resolution` equal cells on `[0, upper]`, each weighted by its overlap
    /// with `[0, theta]`.
    fn discretize(&self, resolution: usize) -> Result<DiscreteDist> {
        if resolution == 0 {
            return Err(invalid("resolution", "must be positive"));
        }
        let width = self.upper / resolution as f64;
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for i in 0..resolution {
            let lo = width * i as f64;
            let overlap = (self.theta.min(lo + width) - lo).max(0.0);
            if overlap > 0.0 {
                atoms.push(lo + 0.5 * width);
                weights.push(overlap / self.theta);
            }
        }
        DiscreteDist::scalar(&atoms, &weights)
    }
}
