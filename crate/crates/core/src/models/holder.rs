use std::sync::Arc;

use rand::Rng;

use super::bump::{bump_derivative, bump_holder, bump_integral, bump_max, difference_holder, SAFETY};
use super::{clip_to_support, discretize_density, GridSampler, StatModel};
use crate::channels::DiscreteDist;
use crate::error::{invalid, Result};
use crate::estimators::ThetaRange;
use crate::numeric::{factorial, simpson};
use crate::representers::{build_kernel, Representer};
use crate::rng::CounterRng;

const SAMPLER_CELLS: usize = 1 << 16;
const QUADRATURE_INTERVALS: usize = 20_000;

/// Scale constants of the base density and of the perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpScales {
    /// Amplitude of the perturbation shape `g = a0 (bump(y + 1) - bump(y))`.
    pub a0: f64,
    /// Height of the base density `a1 bump((x - x0) / a2)`.
    pub a1: f64,
    /// Width of the base density.
    pub a2: f64,
}

/// Density `p0(x) = a1 bump((x - x0) / a2)` with Hölder smoothness `beta` and
/// constant `L / 2`, optionally perturbed by `(L / 2) h^beta g((x - x0) / h)`.
///
/// The functional is the `m`-th derivative at `x0`.
#[derive(Debug, Clone)]
pub struct HolderDensity {
    beta: f64,
    l: f64,
    x0: f64,
    m: usize,
    scales: BumpScales,
    h: Option<f64>,
    lo: f64,
    hi: f64,
    range: ThetaRange,
    sampler: Arc<GridSampler>,
}

impl HolderDensity {
    pub fn base(beta: f64, l: f64, x0: f64, m: usize) -> Result<Self> {
        if !(beta.is_finite() && beta > m as f64) {
            return Err(invalid("smoothness", format!("{beta} must exceed the derivative order {m}")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(invalid("holder_constant", "must be positive"));
        }
        if !x0.is_finite() {
            return Err(invalid("at", "must be finite"));
        }
        let b = beta.floor() as usize;
        let e = beta - b as f64;
        let i0 = bump_integral();
        let a0 = 0.5 / (SAFETY * difference_holder(b, e));
        let a2 = SAFETY * (2.0 * bump_holder(b, e) / (l * i0)).powf(1.0 / (beta + 1.0));
        let a1 = 1.0 / (a2 * i0);
        let scales = BumpScales { a0, a1, a2 };

        let kernel = build_kernel(b - m, m)?;
        let c1 = kernel.abs_moment(beta - m as f64);
        let bound = kernel.sup_norm(m) + c1 * l / factorial(b - m);
        let range = if m == 0 {
            ThetaRange::new(0.0, bound)?
        } else {
            ThetaRange::new(-bound, bound)?
        };
        Self::assemble(beta, l, x0, m, scales, None, range)
    }

    /// Perturbed member at bandwidth `h`.
    pub fn perturbed(&self, h: f64) -> Result<Self> {
        let max = self.max_bandwidth();
        if !(h > 0.0 && h < max) {
            return Err(invalid("perturbation", format!("{h} is outside (0, {max})")));
        }
        Self::assemble(self.beta, self.l, self.x0, self.m, self.scales, Some(h), self.range)
    }

    fn assemble(
        beta: f64,
        l: f64,
        x0: f64,
        m: usize,
        scales: BumpScales,
        h: Option<f64>,
        range: ThetaRange,
    ) -> Result<Self> {
        let half = 0.5 * scales.a2;
        let lo = x0 - half.max(1.5 * h.unwrap_or(0.0));
        let hi = x0 + half;
        let mut model = Self {
            beta,
            l,
            x0,
            m,
            scales,
            h,
            lo,
            hi,
            range,
            sampler: Arc::new(GridSampler::new(|_| 1.0, 0.0, 1.0, 1)?),
        };
        let sampler = GridSampler::new(|x| model.density(x), lo, hi, SAMPLER_CELLS)?;
        model.sampler = Arc::new(sampler);
        Ok(model)
    }

    pub fn scales(&self) -> BumpScales {
        self.scales
    }

    pub fn bandwidth(&self) -> Option<f64> {
        self.h
    }

    /// Interval carrying all of the mass.
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `(delta0, delta1)`: the base density is at least `delta0` on
    /// `[x0 - delta1, x0 + delta1]`.
    pub fn floor(&self) -> (f64, f64) {
        let s = self.scales;
        (s.a1 * super::bump::bump(0.25), 0.25 * s.a2)
    }

    /// Supremum of admissible perturbation bandwidths.
    pub fn max_bandwidth(&self) -> f64 {
        let (delta0, delta1) = self.floor();
        let height = delta0 / (self.l * self.scales.a0 * bump_max());
        (2.0 * delta1).min(height.powf(1.0 / self.beta))
    }

    /// Perturbation shape `g(y) = a0 (bump(y + 1) - bump(y))` and derivatives.
    pub fn shape_derivative(&self, k: usize, y: f64) -> f64 {
        self.scales.a0 * (bump_derivative(k, y + 1.0) - bump_derivative(k, y))
    }

    /// `p^(k)(x)`.
    pub fn density_derivative(&self, k: usize, x: f64) -> f64 {
        let s = self.scales;
        let mut v = s.a1 * s.a2.powi(-(k as i32)) * bump_derivative(k, (x - self.x0) / s.a2);
        if let Some(h) = self.h {
            v += 0.5 * self.l
                * h.powf(self.beta - k as f64)
                * self.shape_derivative(k, (x - self.x0) / h);
        }
        v
    }

    #[inline]
    pub fn density(&self, x: f64) -> f64 {
        self.density_derivative(0, x)
    }

    /// `|theta(p0) - theta(p1)| = (L / 2) h^(beta - m) |g^(m)(0)|`.
    pub fn theta_gap(&self, h: f64) -> f64 {
        0.5 * self.l * h.powf(self.beta - self.m as f64) * self.shape_derivative(self.m, 0.0).abs()
    }

    /// Total variation between the base and the member perturbed at `h`:
    /// `(L / 2) h^(beta + 1) a0 int bump`.
    pub fn tv_gap(&self, h: f64) -> f64 {
        0.5 * self.l * h.powf(self.beta + 1.0) * self.scales.a0 * bump_integral()
    }

    /// `int p` by quadrature.
    pub fn total_mass(&self) -> f64 {
        simpson(|x| self.density(x), self.lo, self.hi, QUADRATURE_INTERVALS)
    }
}

impl StatModel for HolderDensity {
    fn tag(&self) -> &'static str {
        "holder_density"
    }

    fn dim(&self) -> usize {
        1
    }

    fn theta(&self) -> f64 {
        let s = self.scales;
        let m = self.m;
        let mut v = s.a1 * s.a2.powi(-(m as i32)) * bump_derivative(m, 0.0);
        if let Some(h) = self.h {
            v += 0.5 * self.l * h.powf(self.beta - m as f64) * self.shape_derivative(m, 0.0);
        }
        v
    }

    fn theta_range(&self) -> ThetaRange {
        self.range
    }

    #[inline]
    fn sample(&self, rng: &mut CounterRng, out: &mut [f64]) {
        out[0] = self.sampler.sample(rng.random::<f64>());
    }

    fn expectation(&self, rep: &Representer) -> Result<f64> {
        let b = clip_to_support(&[(self.lo, self.hi)], rep)[0];
        Ok(simpson(|x| rep.eval(&[x]) * self.density(x), b.0, b.1, QUADRATURE_INTERVALS))
    }

    fn discretize(&self, resolution: usize) -> Result<DiscreteDist> {
        discretize_density(|x| self.density(x[0]), &[(self.lo, self.hi)], resolution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{holder_constant, linspace};

    fn model() -> HolderDensity {
        HolderDensity::base(1.0, 1.0, 0.0, 0).unwrap()
    }

    #[test]
    fn base_is_a_density() {
        for (beta, m) in [(1.0, 0), (1.5, 0), (2.5, 1)] {
            let p = HolderDensity::base(beta, 2.0, 0.3, m).unwrap();
            assert!((p.total_mass() - 1.0).abs() < 1e-8);
            let h = 0.9 * p.max_bandwidth();
            let q = p.perturbed(h).unwrap();
            assert!((q.total_mass() - 1.0).abs() < 1e-8);
            let (lo, hi) = q.support();
            assert!(linspace(lo, hi, 5001).iter().all(|x| q.density(*x) >= 0.0));
        }
    }

    #[test]
    fn perturbed_holder_constant() {
        for beta in [0.5, 1.0, 1.5] {
            let l = 1.0;
            let p = HolderDensity::base(beta, l, 0.0, 0).unwrap();
            let q = p.perturbed(0.5 * p.max_bandwidth()).unwrap();
            let b = beta.floor() as usize;
            let (lo, hi) = q.support();
            let xs = linspace(lo - 0.1, hi + 0.1, 1500);
            for model in [&p, &q] {
                let vs: Vec<f64> = xs.iter().map(|x| model.density_derivative(b, *x)).collect();
                assert!(holder_constant(&xs, &vs, beta - b as f64) <= l * (1.0 + 1e-6), "beta={beta}");
            }
        }
    }

    #[test]
    fn closed_form_gaps() {
        let p = model();
        let h = 0.5 * p.max_bandwidth();
        let q = p.perturbed(h).unwrap();
        assert!(((p.theta() - q.theta()).abs() - p.theta_gap(h)).abs() < 1e-14);
        let (lo, hi) = q.support();
        let tv = 0.5 * simpson(|x| (q.density(x) - p.density(x)).abs(), lo, hi, 200_000);
        assert!((tv - p.tv_gap(h)).abs() < 1e-8 * p.tv_gap(h).max(1e-3));
        assert!(p.perturbed(p.max_bandwidth()).is_err());
    }

    #[test]
    fn theta_in_range() {
        let p = model();
        assert!(p.theta() > 0.0 && p.theta() <= p.theta_range().hi);
    }

    #[test]
    fn sampler_matches_density() {
        let p = model();
        let mut rng = CounterRng::from_seed(9);
        let n = 200_000;
        let mut x = [0.0];
        let mut acc = 0.0;
        for _ in 0..n {
            p.sample(&mut rng, &mut x);
            acc += x[0] * x[0];
        }
        let (lo, hi) = p.support();
        let second = simpson(|x| x * x * p.density(x), lo, hi, 20_000);
        let fourth = simpson(|x| x.powi(4) * p.density(x), lo, hi, 20_000);
        let se = ((fourth - second * second) / n as f64).sqrt();
        assert!((acc / n as f64 - second).abs() < 4.0 * se);
    }

    #[test]
    fn discretization_converges() {
        let p = model();
        let rep = crate::representers::derivative_kernel(0, 1.0, 1.0, 0.0, 0.2).unwrap();
        let exact = p.expectation(&rep).unwrap();
        let e1 = (rep.expectation(&p.discretize(200).unwrap()).unwrap() - exact).abs();
        let e2 = (rep.expectation(&p.discretize(400).unwrap()).unwrap() - exact).abs();
        assert!(e2 <= e1 + 1e-12);
        assert!(e1 < 10.0 / 200.0);
    }
}
