use rand::Rng;

use super::{DiscreteChannel, DiscreteDist, PrivacyLevel, Pushforward};
use crate::error::{Error, Result};
use crate::representers::Representer;

/// Two-point channel releasing `+z0` with probability `(1 + ell(x) / z0) / 2`
/// and `-z0` otherwise, where `z0 = ||ell|| (e^a + 1) / (e^a - 1)`.
#[derive(Debug, Clone)]
pub struct BinaryChannel {
    representer: Representer,
    level: PrivacyLevel,
    z0: f64,
}

impl BinaryChannel {
    pub fn new(representer: Representer, level: PrivacyLevel) -> Result<Self> {
        let z0 = representer.sup_norm() * level.z_factor();
        if !(z0.is_finite() && z0 > 0.0) {
            return Err(Error::BadSupNorm(representer.sup_norm()));
        }
        Ok(Self {
            representer,
            level,
            z0,
        })
    }

    #[inline]
    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn level(&self) -> PrivacyLevel {
        self.level
    }

    pub fn representer(&self) -> &Representer {
        &self.representer
    }

    /// Probability of releasing `+z0` given that the representer equals `value`.
    #[inline]
    pub fn prob_from_value(&self, value: f64) -> f64 {
        0.5 * (1.0 + value / self.z0)
    }

    /// Probability of releasing `+z0` at input `x`.
    pub fn success_probability(&self, x: &[f64]) -> Result<f64> {
        let v = self.representer.try_eval(x)?;
        Ok(self.prob_from_value(v))
    }

    /// Draws the released value for input `x`.
    pub fn privatize<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Result<f64> {
        let p = self.success_probability(x)?;
        Ok(self.release(p, rng.random::<f64>()))
    }

    /// Maps a success probability and a uniform draw to the released value.
    #[inline]
    pub fn release(&self, success: f64, u: f64) -> f64 {
        if u < success {
            self.z0
        } else {
            -self.z0
        }
    }

    /// Finite version of this channel restricted to the given input points.
    pub fn to_discrete(&self, points: &[Vec<f64>]) -> Result<DiscreteChannel> {
        let rows = points
            .iter()
            .map(|x| {
                let p = self.success_probability(x)?;
                Ok(vec![1.0 - p, p])
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteChannel::new(points.to_vec(), vec![-self.z0, self.z0], rows)
    }

    /// Finite channel whose inputs are representer values rather than points.
    pub fn on_values(&self, values: &[f64]) -> Result<DiscreteChannel> {
        let mut rows = Vec::with_capacity(values.len());
        for &v in values {
            if !(v.abs() <= self.representer.sup_norm()) {
                return Err(Error::SupNormViolation {
                    value: v,
                    sup_norm: self.representer.sup_norm(),
                });
            }
            let p = self.prob_from_value(v);
            rows.push(vec![1.0 - p, p]);
        }
        let inputs = values.iter().map(|v| vec![*v]).collect();
        DiscreteChannel::new(inputs, vec![-self.z0, self.z0], rows)
    }
}

impl Pushforward for BinaryChannel {
    fn pushforward(&self, p: &DiscreteDist) -> Result<DiscreteDist> {
        let mut mean = 0.0;
        for (x, w) in p.iter() {
            mean += w * self.representer.try_eval(x)?;
        }
        let s = self.prob_from_value(mean);
        DiscreteDist::from_flat(1, vec![-self.z0, self.z0], vec![1.0 - s, s])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{audit_privacy, tv_distance};
    use crate::representers::Domain;
    use crate::rng::CounterRng;

    fn sign_rep() -> Representer {
        Representer::scalar(|x| x, 1.0, Domain::interval(-1.0, 1.0)).unwrap()
    }

    fn ln3() -> PrivacyLevel {
        PrivacyLevel::new(3f64.ln()).unwrap()
    }

    #[test]
    fn z0_and_probabilities() {
        let c = BinaryChannel::new(sign_rep(), ln3()).unwrap();
        assert!((c.z0() - 2.0).abs() < 1e-15);
        assert_eq!(c.success_probability(&[0.0]).unwrap(), 0.5);
        assert!((c.success_probability(&[1.0]).unwrap() - 0.75).abs() < 1e-15);
        assert!((c.success_probability(&[-1.0]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn violations_are_errors() {
        let rep = Representer::scalar(|x| 2.0 * x, 1.0, Domain::interval(-1.0, 1.0)).unwrap();
        let c = BinaryChannel::new(rep, ln3()).unwrap();
        assert!(matches!(
            c.success_probability(&[0.9]),
            Err(Error::SupNormViolation { .. })
        ));
        assert!(matches!(
            c.success_probability(&[3.0]),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn audit_equals_alpha() {
        let c = BinaryChannel::new(sign_rep(), ln3()).unwrap();
        let d = c.to_discrete(&[vec![-1.0], vec![0.0], vec![1.0]]).unwrap();
        let a = audit_privacy(&d, ln3()).unwrap();
        assert!((a.max_log_ratio - 3f64.ln()).abs() < 1e-12);
        assert!(a.passed);
    }

    #[test]
    fn pushforward_examples() {
        let c = BinaryChannel::new(sign_rep(), ln3()).unwrap();
        let q = c.pushforward(&DiscreteDist::point_mass(&[1.0])).unwrap();
        assert!((q.weight_of(&[-2.0]) - 0.25).abs() < 1e-15);
        assert!((q.weight_of(&[2.0]) - 0.75).abs() < 1e-15);
        let sym = DiscreteDist::scalar(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        let q = c.pushforward(&sym).unwrap();
        assert_eq!(q.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn privatize_is_deterministic() {
        let c = BinaryChannel::new(sign_rep(), ln3()).unwrap();
        let run = || {
            let mut rng = CounterRng::from_seed(17);
            (0..100).map(|_| c.privatize(&[0.3], &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empirical_frequencies() {
        let c = BinaryChannel::new(sign_rep(), ln3()).unwrap();
        let mut rng = CounterRng::from_seed(5);
        let n = 1_000_000;
        let plus = (0..n)
            .filter(|_| c.privatize(&[0.0], &mut rng).unwrap() > 0.0)
            .count();
        assert!((plus as f64 / n as f64 - 0.5).abs() < 0.002);

        let mean = (0..n).map(|_| c.privatize(&[1.0], &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 4.0 * 3f64.sqrt() / 1e3);
    }

    #[test]
    fn empirical_matches_pushforward() {
        let c = BinaryChannel::new(sign_rep(), ln3()).unwrap();
        let p = DiscreteDist::scalar(&[-1.0, 0.2, 0.9], &[0.3, 0.3, 0.4]).unwrap();
        let target = c.pushforward(&p).unwrap();
        let mut rng = CounterRng::from_seed(11);
        let n = 1_000_000;
        let mut plus = 0usize;
        let cdf = [0.3, 0.6, 1.0];
        for _ in 0..n {
            let u: f64 = rng.random();
            let i = cdf.iter().position(|c| u < *c).unwrap_or(2);
            if c.privatize(p.atom(i), &mut rng).unwrap() > 0.0 {
                plus += 1;
            }
        }
        let f = plus as f64 / n as f64;
        let emp = DiscreteDist::scalar(&[-2.0, 2.0], &[1.0 - f, f]).unwrap();
        assert!(tv_distance(&emp, &target) < 0.005);
    }
}
