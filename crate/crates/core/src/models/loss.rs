use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Loss applied to the absolute estimation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossFn {
    /// `t^gamma`.
    Power { gamma: f64 },
    /// `t^2 / 2` below `gamma`, `gamma (t - gamma / 2)` above.
    Huber { gamma: f64 },
}

impl Default for LossFn {
    fn default() -> Self {
        LossFn::Power { gamma: 2.0 }
    }
}

impl LossFn {
    pub fn power(gamma: f64) -> Result<Self> {
        let l = LossFn::Power { gamma };
        l.validate()?;
        Ok(l)
    }

    pub fn huber(gamma: f64) -> Result<Self> {
        let l = LossFn::Huber { gamma };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        let g = match self {
            LossFn::Power { gamma } | LossFn::Huber { gamma } => *gamma,
        };
        if !(g.is_finite() && g > 0.0) {
            return Err(invalid("gamma", format!("{g} is not positive")));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            LossFn::Power { gamma } => {
                if gamma == 2.0 {
                    t * t
                } else {
                    t.powf(gamma)
                }
            }
            LossFn::Huber { gamma } => {
                if t < gamma {
                    0.5 * t * t
                } else {
                    gamma * (t - 0.5 * gamma)
                }
            }
        }
    }

    /// Constant `a` with `l(3t/2) <= a l(t)`.
    pub fn doubling_constant(&self) -> f64 {
        match *self {
            LossFn::Power { gamma } => 1.5f64.powf(gamma),
            LossFn::Huber { .. } => 4.5,
        }
    }

    /// Exponent of `l(t)` as `t -> 0`.
    pub fn small_error_exponent(&self) -> f64 {
        match *self {
            LossFn::Power { gamma } => gamma,
            LossFn::Huber { .. } => 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let sq = LossFn::power(2.0).unwrap();
        assert_eq!(sq.eval(3.0), 9.0);
        assert_eq!(sq.doubling_constant(), 2.25);
        let h = LossFn::huber(1.0).unwrap();
        assert_eq!(h.eval(0.5), 0.125);
        assert_eq!(h.eval(2.0), 1.5);
        assert!(LossFn::power(0.0).is_err());
        assert!(LossFn::huber(-1.0).is_err());
    }

    #[test]
    fn doubling_on_grid() {
        for loss in [
            LossFn::power(0.5).unwrap(),
            LossFn::power(2.0).unwrap(),
            LossFn::power(3.0).unwrap(),
            LossFn::huber(0.3).unwrap(),
            LossFn::huber(2.0).unwrap(),
        ] {
            assert_eq!(loss.eval(0.0), 0.0);
            let a = loss.doubling_constant();
            let mut prev = 0.0;
            for i in 1..=10_000 {
                let t = i as f64 * 1e-3;
                let v = loss.eval(t);
                assert!(v >= prev);
                assert!(loss.eval(1.5 * t) <= a * v * (1.0 + 1e-12));
                prev = v;
            }
        }
    }

    #[test]
    fn json() {
        let l: LossFn = serde_json::from_str(r#"{"kind":"huber","gamma":1.0}"#).unwrap();
        assert_eq!(l, LossFn::Huber { gamma: 1.0 });
    }
}
