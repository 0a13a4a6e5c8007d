use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{hellinger_distance, tv_distance, DiscreteDist, Pushforward};
use crate::error::{invalid, Error, Result};

/// Distance used by a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Tv,
    Hellinger,
}

impl Metric {
    pub fn distance(&self, p: &DiscreteDist, q: &DiscreteDist) -> f64 {
        match self {
            Metric::Tv => tv_distance(p, q),
            Metric::Hellinger => hellinger_distance(p, q),
        }
    }
}

/// Supremum over the pairs within the distance budget; `Empty` when no pair
/// qualifies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulus {
    Empty,
    Value(f64),
}

impl Modulus {
    pub fn value(&self) -> Option<f64> {
        match self {
            Modulus::Empty => None,
            Modulus::Value(v) => Some(*v),
        }
    }

    /// Value with the empty supremum mapped to `-inf`.
    pub fn as_f64(&self) -> f64 {
        self.value().unwrap_or(f64::NEG_INFINITY)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MemberSpec", into = "MemberSpec")]
pub struct FamilyMember {
    pub dist: DiscreteDist,
    pub theta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberSpec {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
    theta: f64,
}

impl TryFrom<MemberSpec> for FamilyMember {
    type Error = Error;

    fn try_from(s: MemberSpec) -> Result<Self> {
        Ok(Self {
            dist: DiscreteDist::new(s.atoms, s.weights)?,
            theta: s.theta,
        })
    }
}

impl From<FamilyMember> for MemberSpec {
    fn from(m: FamilyMember) -> Self {
        MemberSpec {
            atoms: m.dist.atoms().map(|a| a.to_vec()).collect(),
            weights: m.dist.weights().to_vec(),
            theta: m.theta,
        }
    }
}

/// Non-empty list of distributions with their functional values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<FamilyMember>", into = "Vec<FamilyMember>")]
pub struct FiniteFamily {
    members: Vec<FamilyMember>,
}

impl TryFrom<Vec<FamilyMember>> for FiniteFamily {
    type Error = Error;

    fn try_from(members: Vec<FamilyMember>) -> Result<Self> {
        FiniteFamily::new(members)
    }
}

impl From<FiniteFamily> for Vec<FamilyMember> {
    fn from(f: FiniteFamily) -> Self {
        f.members
    }
}

impl FiniteFamily {
    pub fn new(members: Vec<FamilyMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(invalid("family", "needs at least one member"));
        }
        if let Some(m) = members.iter().find(|m| !m.theta.is_finite()) {
            return Err(invalid("theta", format!("{} is not finite", m.theta)));
        }
        Ok(Self { members })
    }

    pub fn from_pairs(pairs: Vec<(DiscreteDist, f64)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(dist, theta)| FamilyMember { dist, theta })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    /// `max theta - min theta`.
    pub fn theta_spread(&self) -> f64 {
        let (lo, hi) = self
            .members
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
                (lo.min(m.theta), hi.max(m.theta))
            });
        hi - lo
    }

    /// Adds every mixture `(1 - l) P_i + l P_j` with `l = k / (points - 1)`,
    /// giving it the value `(1 - l) theta_i + l theta_j`. Only meaningful for
    /// functionals that are linear in the distribution.
    pub fn with_mixtures(&self, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(invalid("points", "mixture grid needs both endpoints"));
        }
        let mut out = self.members.clone();
        for i in 0..self.members.len() {
            for j in (i + 1)..self.members.len() {
                let (a, b) = (&self.members[i], &self.members[j]);
                for k in 1..points - 1 {
                    let l = k as f64 / (points - 1) as f64;
                    out.push(FamilyMember {
                        dist: a.dist.mixture(&b.dist, l)?,
                        theta: (1.0 - l) * a.theta + l * b.theta,
                    });
                }
            }
        }
        Self::new(out)
    }

    /// Members pushed through `channel`, values unchanged.
    pub fn pushforward(&self, channel: &dyn Pushforward) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| {
                Ok(FamilyMember {
                    dist: channel.pushforward(&m.dist)?,
                    theta: m.theta,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }
}

/// All pairwise distances of a family, sorted, with the running maximum of
/// `|theta_i - theta_j|`; answers modulus queries by binary search.
#[derive(Debug, Clone)]
pub struct ModulusTable {
    distances: Vec<f64>,
    best: Vec<f64>,
}

impl ModulusTable {
    pub fn new(family: &FiniteFamily, metric: Metric) -> Self {
        let members = family.members();
        let mut pairs: Vec<(f64, f64)> = (0..members.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                let a = &members[i];
                members[i..].iter().map(move |b| {
                    (metric.distance(&a.dist, &b.dist), (a.theta - b.theta).abs())
                })
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut run = f64::NEG_INFINITY;
        let (distances, best) = pairs
            .into_iter()
            .map(|(d, gap)| {
                run = run.max(gap);
                (d, run)
            })
            .unzip();
        Self { distances, best }
    }

    pub fn at(&self, eps: f64) -> Modulus {
        let idx = self.distances.partition_point(|d| *d <= eps);
        if idx == 0 {
            Modulus::Empty
        } else {
            Modulus::Value(self.best[idx - 1])
        }
    }

    /// Smallest strictly positive pairwise distance.
    pub fn min_positive_distance(&self) -> Option<f64> {
        self.distances.iter().copied().find(|d| *d > 0.0)
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.last().copied().unwrap_or(0.0)
    }
}

/// `sup { |theta_i - theta_j| : d(P_i, P_j) <= eps }` over all ordered pairs,
/// including `i = j`.
pub fn brute_force_modulus(family: &FiniteFamily, eps: f64, metric: Metric) -> Modulus {
    let members = family.members();
    let best = (0..members.len())
        .into_par_iter()
        .map(|i| {
            let a = &members[i];
            members[i..]
                .iter()
                .filter(|b| metric.distance(&a.dist, &b.dist) <= eps)
                .map(|b| (a.theta - b.theta).abs())
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        Modulus::Empty
    } else {
        Modulus::Value(best)
    }
}

/// Hellinger modulus after pushing every member through `channel`.
pub fn privatized_modulus(
    family: &FiniteFamily,
    channel: &dyn Pushforward,
    eps: f64,
) -> Result<Modulus> {
    Ok(brute_force_modulus(
        &family.pushforward(channel)?,
        eps,
        Metric::Hellinger,
    ))
}
