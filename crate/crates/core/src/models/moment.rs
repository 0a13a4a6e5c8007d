use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StatModel;
use crate::channels::{tv_distance, DiscreteDist};
use crate::error::{invalid, Result};
use crate::estimators::ThetaRange;
use crate::representers::Representer;
use crate::rng::CounterRng;

/// A distribution on finitely many atoms with a known functional value.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    dist: DiscreteDist,
    theta: f64,
    range: ThetaRange,
    cdf: Vec<f64>,
}

impl DiscreteModel {
    pub fn new(dist: DiscreteDist, theta: f64, range: ThetaRange) -> Result<Self> {
        if !theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        let mut acc = 0.0;
        let cdf = dist
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Self {
            dist,
            theta,
            range,
            cdf,
        })
    }

    pub fn dist(&self) -> &DiscreteDist {
        &self.dist
    }
}

impl StatModel for DiscreteModel {
    fn tag(&self) -> &'static str {
        "discrete"
    }

    fn dim(&self) -> usize {
        self.dist.dim()
    }

    fn theta(&self) -> f64 {
        self.theta
    }

    fn theta_range(&self) -> ThetaRange {
        self.range
    }

    #[inline]
    fn sample(&self, rng: &mut CounterRng, out: &mut [f64]) {
        let u = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let i = self.cdf.partition_point(|c| *c <= u).min(self.cdf.len() - 1);
        out.copy_from_slice(self.dist.atom(i));
    }

    fn expectation(&self, rep: &Representer) -> Result<f64> {
        rep.expectation(&self.dist)
    }

    fn discretize(&self, _resolution: usize) -> Result<DiscreteDist> {
        Ok(self.dist.clone())
    }
}

/// Whether `f` is bounded on the class (then the pair sits at `|f| <= L^(1/kappa)`)
/// or only has a bounded `kappa`-th moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentCase {
    Bounded,
    Heavy,
}

/// Two-point construction for `theta(P) = E_P[x^power]` over
/// `{P : E|f|^kappa <= L}`: a point mass and its `eps`-contamination by a far
/// atom.
#[derive(Debug, Clone)]
pub struct MomentPair {
    case: MomentCase,
    power: i32,
    kappa: f64,
    bound: f64,
    eps: f64,
    near: f64,
    far: f64,
}

impl MomentPair {
    pub fn new(
        case: MomentCase,
        power: i32,
        kappa: f64,
        bound: f64,
        delta: f64,
        eps: f64,
    ) -> Result<Self> {
        if power < 1 {
            return Err(invalid("power", "must be at least 1"));
        }
        if !(kappa.is_finite() && kappa > 1.0) {
            return Err(invalid("moment_exponent", "must exceed 1"));
        }
        if !(bound.is_finite() && bound > 0.0) {
            return Err(invalid("moment_bound", "must be positive"));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid("eps", format!("{eps} is outside (0, 1)")));
        }
        let f_inv = |v: f64| v.powf(1.0 / power as f64);
        let (near, far) = match case {
            MomentCase::Heavy => {
                if !(delta > 0.0 && delta < (bound / 2.0).powf(1.0 / kappa)) {
                    return Err(invalid("delta", format!("{delta} is outside (0, (L/2)^(1/kappa))")));
                }
                (f_inv(delta), f_inv((bound / (2.0 * eps)).powf(1.0 / kappa)))
            }
            MomentCase::Bounded => (0.0, f_inv(bound.powf(1.0 / kappa))),
        };
        let pair = Self {
            case,
            power,
            kappa,
            bound,
            eps,
            near,
            far,
        };
        for m in [pair.moment(false), pair.moment(true)] {
            if m > bound * (1.0 + 1e-12) {
                return Err(invalid("eps", format!("moment {m} exceeds the bound {bound}")));
            }
        }
        Ok(pair)
    }

    pub fn case(&self) -> MomentCase {
        self.case
    }

    fn f(&self, x: f64) -> f64 {
        x.powi(self.power)
    }

    /// `E|f|^kappa` of the point mass (`false`) or the contaminated member.
    pub fn moment(&self, contaminated: bool) -> f64 {
        let near = self.f(self.near).abs().powf(self.kappa);
        if contaminated {
            (1.0 - self.eps) * near + self.eps * self.f(self.far).abs().powf(self.kappa)
        } else {
            near
        }
    }

    pub fn thetas(&self) -> (f64, f64) {
        let t0 = self.f(self.near);
        (t0, (1.0 - self.eps) * t0 + self.eps * self.f(self.far))
    }

    pub fn theta_gap(&self) -> f64 {
        let (a, b) = self.thetas();
        (a - b).abs()
    }

    pub fn atoms(&self) -> (f64, f64) {
        (self.near, self.far)
    }

    pub fn dists(&self) -> (DiscreteDist, DiscreteDist) {
        let p0 = DiscreteDist::point_mass(&[self.near]);
        let p1 = DiscreteDist::scalar(&[self.near, self.far], &[1.0 - self.eps, self.eps])
            .expect("two distinct atoms");
        (p0, p1)
    }

    pub fn tv(&self) -> f64 {
        let (p0, p1) = self.dists();
        tv_distance(&p0, &p1)
    }

    /// `|theta| <= L^(1/kappa)` over the class.
    pub fn theta_range(&self) -> ThetaRange {
        let r = self.bound.powf(1.0 / self.kappa);
        ThetaRange { lo: -r, hi: r }
    }

    pub fn models(&self) -> (DiscreteModel, DiscreteModel) {
        let (p0, p1) = self.dists();
        let (t0, t1) = self.thetas();
        let range = self.theta_range();
        (
            DiscreteModel::new(p0, t0, range).expect("finite theta"),
            DiscreteModel::new(p1, t1, range).expect("finite theta"),
        )
    }
}
