//! Property and inequality suite behind `ldpmm check`.
//!
//! Each check draws its own random instances from a seeded generator and
//! counts how many of them satisfy the property.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::channels::{
    audit_privacy, hellinger_affinity, hellinger_distance, tv_distance, BinaryChannel,
    DiscreteChannel, PrivacyLevel, Pushforward,
};
use crate::error::Result;
use crate::estimators::{
    build_plan, critical_value_g, AffineSurrogate, BinarySearchPlan, LinearProbMap, ThetaProbMap,
    ThetaRange,
};
use crate::moduli::{
    contraction_check, homogeneity_check, linear_lower_bound_check, monotone_check,
    private_hellinger_check, sandwich_check, FamilyMember, FiniteFamily, Metric, ModulusTable,
};
use crate::numeric::{linspace, simpson};
use crate::random::{random_convex_family, random_dist, random_private_channel};
use crate::representers::{build_kernel, Domain, Representer};

const TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteCheck {
    pub name: &'static str,
    pub trials: usize,
    pub passed: usize,
    /// Largest violation seen, `0` when every trial passed.
    pub worst: f64,
}

impl SuiteCheck {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            trials: 0,
            passed: 0,
            worst: 0.0,
        }
    }

    /// Records a trial of `lhs <= rhs + tol`.
    fn le(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.flag(lhs - rhs, tol);
    }

    fn flag(&mut self, excess: f64, tol: f64) {
        self.trials += 1;
        if excess <= tol {
            self.passed += 1;
        } else {
            self.worst = if excess.is_nan() { f64::NAN } else { self.worst.max(excess) };
        }
    }

    fn ok(&mut self, cond: bool) {
        self.flag(if cond { 0.0 } else { 1.0 }, 0.0);
    }

    pub fn all_passed(&self) -> bool {
        self.trials > 0 && self.passed == self.trials
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(SuiteCheck::all_passed)
    }

    pub fn total_trials(&self) -> usize {
        self.checks.iter().map(|c| c.trials).sum()
    }

    pub fn total_passed(&self) -> usize {
        self.checks.iter().map(|c| c.passed).sum()
    }
}

/// Runs every check with generators seeded from `seed`.
pub fn run_suite(seed: u64) -> Result<SuiteReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let checks = vec![
        privacy_tightness(&[0.1, 0.5, 1.0, 3f64.ln(), 3.0])?,
        tv_identity(&mut rng, 200)?,
        contraction(&mut rng, 200)?,
        data_processing(&mut rng, 200)?,
        distance_sandwich(&mut rng, 200),
        g_properties(&mut rng, 1000)?,
        stepwise_equivalence(&mut rng, 1000)?,
        affine_surrogate(12)?,
        kernel_conditions()?,
        moduli_properties(&mut rng, 20)?,
    ];
    Ok(SuiteReport { seed, checks })
}

/// Representer taking the tabulated values on the symbols `0..k`.
pub fn table_representer(values: Vec<f64>) -> Result<Representer> {
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let hi = (values.len() - 1) as f64;
    Representer::scalar(
        move |x| values[(x.round() as usize).min(values.len() - 1)],
        sup,
        Domain::interval(0.0, hi),
    )
}

/// Audited max log-ratio of the binary channel on `+-1` equals `alpha`.
pub fn privacy_tightness(alphas: &[f64]) -> Result<SuiteCheck> {
    let mut out = SuiteCheck::new("privacy_tightness");
    let rep = Representer::scalar(|x| x, 1.0, Domain::interval(-1.0, 1.0))?;
    for &a in alphas {
        let level = PrivacyLevel::new(a)?;
        let ch = BinaryChannel::new(rep.clone(), level)?.on_values(&[-1.0, 1.0])?;
        let audit = audit_privacy(&ch, level)?;
        out.flag((audit.max_log_ratio - a).abs(), TOL);
    }
    Ok(out)
}

/// Total variation of the released bits equals `|E0 ell - E1 ell| / (2 z0)`.
pub fn tv_identity<R: Rng + ?Sized>(rng: &mut R, trials: usize) -> Result<SuiteCheck> {
    let mut out = SuiteCheck::new("tv_identity");
    for _ in 0..trials {
        let k = rng.random_range(2..8);
        let values: Vec<f64> = (0..k).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
        let level = PrivacyLevel::new(0.05 + 3.0 * rng.random::<f64>())?;
        let ch = BinaryChannel::new(table_representer(values.clone())?, level)?;
        let (p, q) = (random_dist(rng, k, 0.2), random_dist(rng, k, 0.2));
        let lhs = tv_distance(&ch.pushforward(&p)?, &ch.pushforward(&q)?);
        let mean = |d: &crate::channels::DiscreteDist| d.expectation(|x| values[x[0] as usize]);
        let rhs = (mean(&p) - mean(&q)).abs() / (2.0 * ch.z0());
        out.flag((lhs - rhs).abs(), TOL);
    }
    Ok(out)
}

/// Product-space total variation against `sqrt(2n) (e^alpha - 1) d_tv`.
pub fn contraction<R: Rng + ?Sized>(rng: &mut R, trials: usize) -> Result<SuiteCheck> {
    let mut out = SuiteCheck::new("contraction");
    for t in 0..trials {
        let n = 1 + t % 3;
        let (k_in, k_out) = (rng.random_range(2..5), rng.random_range(2..5));
        let level = PrivacyLevel::new(0.05 + 2.0 * rng.random::<f64>())?;
        let ch = random_private_channel(rng, k_in, k_out, level)?;
        let (p, q) = (random_dist(rng, k_in, 0.2), random_dist(rng, k_in, 0.2));
        let rep = contraction_check(&[ch], &p, &q, n, level)?;
        out.le(rep.lhs, rep.rhs, TOL);
    }
    Ok(out)
}

/// Channels increase the affinity and shrink the Hellinger distance.
pub fn data_processing<R: Rng + ?Sized>(rng: &mut R, trials: usize) -> Result<SuiteCheck> {
    let mut out = SuiteCheck::new("data_processing");
    for _ in 0..trials {
        let (k_in, k_out) = (rng.random_range(2..6), rng.random_range(2..6));
        let level = PrivacyLevel::new(0.1 + 5.0 * rng.random::<f64>())?;
        let ch = random_private_channel(rng, k_in, k_out, level)?;
        let (p, q) = (random_dist(rng, k_in, 0.3), random_dist(rng, k_in, 0.3));
        let (qp, qq) = (ch.pushforward(&p)?, ch.pushforward(&q)?);
        let excess = (hellinger_affinity(&p, &q) - hellinger_affinity(&qp, &qq))
            .max(hellinger_distance(&qp, &qq) - hellinger_distance(&p, &q));
        out.flag(excess, TOL);
    }
    Ok(out)
}

/// `d_tv <= d_h <= sqrt(2 d_tv)`.
pub fn distance_sandwich<R: Rng + ?Sized>(rng: &mut R, trials: usize) -> SuiteCheck {
    let mut out = SuiteCheck::new("distance_sandwich");
    for _ in 0..trials {
        let k = rng.random_range(2..10);
        let (p, q) = (random_dist(rng, k, 0.3), random_dist(rng, k, 0.3));
        let (tv, h) = (tv_distance(&p, &q), hellinger_distance(&p, &q));
        out.flag((tv - h).max(h - (2.0 * tv).sqrt()), TOL);
    }
    out
}

/// `s < G(s, t) < t`, symmetry and strict monotonicity in both arguments.
pub fn g_properties<R: Rng + ?Sized>(rng: &mut R, trials: usize) -> Result<SuiteCheck> {
    let mut out = SuiteCheck::new("g_properties");
    for _ in 0..trials {
        let mut s = 0.01 + 0.98 * rng.random::<f64>();
        let mut t = 0.01 + 0.98 * rng.random::<f64>();
        if s > t {
            std::mem::swap(&mut s, &mut t);
        }
        if t - s < 1e-6 {
            continue;
        }
        let g = critical_value_g(s, t)?;
        let step = 1e-3 * (t - s);
        let up_s = critical_value_g(s + step, t)?;
        let up_t = critical_value_g(s, t + step.min(0.5 * (1.0 - t)))?;
        out.ok(s < g && g < t && critical_value_g(t, s)? == g && up_s > g && up_t > g);
    }
    Ok(out)
}

/// Level-by-level test walk: start at index 1 and at level `k` test the
/// pair `(a, b) = (lo + j delta, lo + (j + N - k - 1) delta)`, moving right
/// when the statistic reaches the likelihood-ratio threshold.
pub fn stepwise_estimate(plan: &BinarySearchPlan, map: &dyn ThetaProbMap, t: f64) -> f64 {
    let r = plan.range();
    if plan.is_degenerate() {
        return r.midpoint();
    }
    let n = plan.n_cells();
    let d = plan.delta();
    let mut j = 1usize;
    for k in 1..=(n - 2) {
        let a = r.lo + j as f64 * d;
        let b = r.lo + (j + n - k - 1) as f64 * d;
        let c = critical_value_g(map.prob(a), map.prob(b)).expect("probabilities inside (0, 1)");
        if t >= c {
            j += 1;
        }
    }
    r.lo + j as f64 * d
}

fn random_plan<R: Rng + ?Sized>(rng: &mut R) -> Result<(BinarySearchPlan, LinearProbMap)> {
    let lo = 2.0 * rng.random::<f64>() - 1.0;
    let range = ThetaRange::new(lo, lo + 0.2 + 2.0 * rng.random::<f64>())?;
    let z0 = range.lo.abs().max(range.hi.abs()) * (1.05 + 4.0 * rng.random::<f64>());
    let map = LinearProbMap::new(z0, range)?;
    let delta = range.width() / (3.0 + 40.0 * rng.random::<f64>());
    Ok((build_plan(delta, range, &map)?, map))
}

/// Partition lookup agrees with the explicit test walk.
pub fn stepwise_equivalence<R: Rng + ?Sized>(rng: &mut R, trials: usize) -> Result<SuiteCheck> {
    let mut out = SuiteCheck::new("stepwise_equivalence");
    for _ in 0..trials {
        let (plan, map) = random_plan(rng)?;
        let t = match rng.random_range(0..4) {
            // land exactly on a threshold now and then
            0 if !plan.critical_values().is_empty() => {
                let c = plan.critical_values();
                c[rng.random_range(0..c.len())]
            }
            _ => rng.random::<f64>(),
        };
        out.ok(plan.estimate_from_fraction(t) == stepwise_estimate(&plan, &map, t));
    }
    Ok(out)
}

/// Projected affine surrogate within `2 delta` of the estimator at every
/// attainable sample mean for `n <= max_n`.
pub fn affine_surrogate(max_n: usize) -> Result<SuiteCheck> {
    let mut out = SuiteCheck::new("affine_surrogate");
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut plans = 0;
    while plans < 25 {
        let (plan, map) = random_plan(&mut rng)?;
        if plan.n_cells() < 4 {
            continue;
        }
        plans += 1;
        let sur = AffineSurrogate::new(&plan, &map)?;
        for n in 1..=max_n {
            for k in 0..=n {
                let zbar = plan.z0() * (2.0 * k as f64 - n as f64) / n as f64;
                let gap = (plan.estimate_from_mean(zbar) - sur.projected(zbar)).abs();
                out.le(gap, 2.0 * plan.delta(), TOL);
            }
        }
    }
    Ok(out)
}

/// Moment and boundary conditions of the polynomial kernels for orders
/// `0..=2` and smoothness `0..=1`, by Simpson quadrature.
pub fn kernel_conditions() -> Result<SuiteCheck> {
    let mut out = SuiteCheck::new("kernel_conditions");
    for order in 0..=2 {
        for m in 0..=1 {
            let k = build_kernel(order, m)?;
            let mass = simpson(|u| k.eval(u), -1.0, 1.0, 2000);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            out.flag((mass - sign).abs(), 1e-8);
            for j in 1..=order {
                let mj = simpson(|u| u.powi(j as i32) * k.eval(u), -1.0, 1.0, 2000);
                out.flag(mj.abs(), 1e-8);
            }
            for i in 0..=m {
                for edge in [-1.0, 1.0] {
                    out.flag(k.eval_derivative(i, edge).abs(), 1e-8);
                }
            }
        }
    }
    Ok(out)
}

fn segment<R: Rng + ?Sized>(rng: &mut R, k: usize, points: usize) -> Result<FiniteFamily> {
    random_convex_family(rng, 2, k, points)
}

/// Monotonicity, sandwich, homogeneity, the linear lower bound and the
/// private Hellinger inequality on random mixture families.
pub fn moduli_properties<R: Rng + ?Sized>(rng: &mut R, families: usize) -> Result<SuiteCheck> {
    let mut out = SuiteCheck::new("moduli_properties");
    for _ in 0..families {
        let k = rng.random_range(3..6);
        let fam = random_convex_family(rng, 3, k, 11)?;
        let grid = linspace(0.0, 1.0, 41);
        out.ok(monotone_check(&fam, Metric::Tv, &grid).passed);
        out.ok(monotone_check(&fam, Metric::Hellinger, &grid).passed);
        out.ok(sandwich_check(&fam, &grid).passed);

        let seg = segment(rng, k, 21)?;
        let table = ModulusTable::new(&seg, Metric::Tv);
        if let Some(start) = table.min_positive_distance() {
            let lin = linspace(start, table.max_distance(), 20);
            out.ok(linear_lower_bound_check(&seg, &lin).passed);
        }

        let level = PrivacyLevel::new(0.2 + 2.0 * rng.random::<f64>())?;
        let values: Vec<f64> = (0..k).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
        let bin = BinaryChannel::new(table_representer(values.clone())?, level)?;
        let pushed = ModulusTable::new(&seg.pushforward(&bin)?, Metric::Hellinger);
        if let Some(start) = pushed.min_positive_distance() {
            let hgrid = linspace(start, pushed.max_distance() / 2.0, 21);
            out.ok(homogeneity_check(&seg, &bin, &[2.0, 3.0], &hgrid, HOMOGENEITY_SLACK)?.passed);
        }
        let rr = DiscreteChannel::randomized_response(k, level)?;
        let pushed = ModulusTable::new(&seg.pushforward(&rr)?, Metric::Hellinger);
        if let Some(start) = pushed.min_positive_distance() {
            let hgrid = linspace(start, pushed.max_distance() / 2.0, 21);
            out.ok(homogeneity_check(&seg, &rr, &[2.0, 3.0], &hgrid, HOMOGENEITY_SLACK)?.passed);
        }

        let ell_family = FiniteFamily::new(
            fam.members()
                .iter()
                .map(|m| FamilyMember {
                    theta: m.dist.expectation(|x| values[x[0] as usize]),
                    dist: m.dist.clone(),
                })
                .collect(),
        )?;
        out.ok(private_hellinger_check(&ell_family, &bin, &grid)?.passed);
    }
    Ok(out)
}

/// Absolute slack of the homogeneity check, for rounding in the pushed
/// forward distances.
pub const HOMOGENEITY_SLACK: f64 = 1e-6;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let report = run_suite(7).unwrap();
        for c in &report.checks {
            assert!(c.all_passed(), "{c:?}");
        }
        assert!(report.total_trials() > 2000);
    }

    #[test]
    fn violations_are_counted() {
        let mut c = SuiteCheck::new("x");
        c.le(1.0, 0.5, 0.0);
        c.le(0.5, 1.0, 0.0);
        assert_eq!((c.trials, c.passed), (2, 1));
        assert_eq!(c.worst, 0.5);
        assert!(!c.all_passed());
    }
}
