use rand::Rng;
use rand_distr::StandardNormal;

use super::bump::{bump_derivative, bump_integral, bump_max, difference_holder, grid_holder, SAFETY};
use super::{box_quadrature, clip_to_support, discretize_density, StatModel};
use crate::channels::DiscreteDist;
use crate::error::{invalid, Error, Result};
use crate::estimators::ThetaRange;
use crate::representers::{build_kernel, Representer};
use crate::rng::CounterRng;

const MAX_DIM: usize = 3;
/// Half-width of the integration box in units of the base scale.
const BOX_SIGMAS: f64 = 8.0;
const MAX_AXIS_BANDWIDTH: f64 = 2.0 / 3.0;

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Separable perturbation `h prod_j (L_j / 2) g_j((x_j - x0_j) / h_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub height: f64,
    pub widths: Vec<f64>,
}

/// Isotropic Gaussian density at `x0` inside the anisotropic Hölder class
/// with per-axis smoothness `beta_j <= 1` and constants `L_j / 2`, optionally
/// carrying a separable bump perturbation. The functional is `p(x0)`.
#[derive(Debug, Clone)]
pub struct AnisotropicDensity {
    beta: Vec<f64>,
    l: Vec<f64>,
    x0: Vec<f64>,
    sigma: f64,
    amplitudes: Vec<f64>,
    perturbation: Option<Perturbation>,
    range: ThetaRange,
}

impl AnisotropicDensity {
    pub fn new(beta: Vec<f64>, l: Vec<f64>, x0: Vec<f64>) -> Result<Self> {
        let d = beta.len();
        if d == 0 || d > MAX_DIM {
            return Err(invalid("smoothness", format!("dimension {d} is outside 1..={MAX_DIM}")));
        }
        for len in [l.len(), x0.len()] {
            if len != d {
                return Err(Error::DimensionMismatch { expected: d, got: len });
            }
        }
        if beta.iter().any(|b| !(*b > 0.0 && *b <= 1.0)) {
            return Err(invalid("smoothness", "entries must lie in (0, 1]"));
        }
        if l.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("holder_constant", "entries must be positive"));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(invalid("at", "entries must be finite"));
        }
        let norm_const = (2.0 * std::f64::consts::PI).powf(-0.5 * (d as f64 - 1.0));
        let sigma = SAFETY
            * beta
                .iter()
                .zip(&l)
                .map(|(b, l)| {
                    let hol = grid_holder(std_normal_pdf, -8.0, 8.0, *b);
                    (2.0 * norm_const * hol / l).powf(1.0 / (d as f64 + b))
                })
                .fold(0.0, f64::max);
        let amplitudes = beta
            .iter()
            .map(|b| 0.5 / (SAFETY * difference_holder(0, *b)))
            .collect();

        let kernel = build_kernel(0, 0)?;
        let bound = kernel.sup_norm(0).powi(d as i32)
            + beta
                .iter()
                .zip(&l)
                .map(|(b, l)| l * kernel.abs_moment(*b))
                .sum::<f64>();
        let model = Self {
            beta,
            l,
            x0,
            sigma,
            amplitudes,
            perturbation: None,
            range: ThetaRange::new(0.0, bound)?,
        };
        if model.theta() > bound {
            return Err(invalid("holder_constant", "base density exceeds the functional range"));
        }
        Ok(model)
    }

    pub fn dim_count(&self) -> usize {
        self.beta.len()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn perturbation(&self) -> Option<&Perturbation> {
        self.perturbation.as_ref()
    }

    /// `sup |g_j| = a0_j e^-1`.
    pub fn shape_sup(&self, j: usize) -> f64 {
        self.amplitudes[j] * bump_max()
    }

    /// `int |g_j| = 2 a0_j int bump`.
    pub fn shape_l1(&self, j: usize) -> f64 {
        2.0 * self.amplitudes[j] * bump_integral()
    }

    pub fn shape(&self, j: usize, y: f64) -> f64 {
        self.amplitudes[j] * (bump_derivative(0, y + 1.0) - bump_derivative(0, y))
    }

    /// `cbar_j = [prod_{k != j} (L_k / 2) sup|g_k|]^-1`.
    pub fn axis_constants(&self) -> Vec<f64> {
        let d = self.dim_count();
        (0..d)
            .map(|j| {
                let prod: f64 = (0..d)
                    .filter(|k| *k != j)
                    .map(|k| 0.5 * self.l[k] * self.shape_sup(k))
                    .product();
                1.0 / prod
            })
            .collect()
    }

    /// `(c0, c2)` with `c0 = min_j cbar_j` and `c2 = prod_j L_j |g_j|_1 / 2`.
    pub fn system_constants(&self) -> (f64, f64) {
        let c0 = self.axis_constants().into_iter().fold(f64::INFINITY, f64::min);
        let c2 = (0..self.dim_count())
            .map(|j| 0.5 * self.l[j] * self.shape_l1(j))
            .product();
        (c0, c2)
    }

    pub fn rbar(&self) -> f64 {
        self.beta.iter().map(|b| 1.0 / b).sum()
    }

    /// Solves `h c2 prod h_j = target` with `h h_j^(-beta_j) = c0` for all `j`.
    pub fn solve_system(&self, target: f64) -> Perturbation {
        let (c0, c2) = self.system_constants();
        let rbar = self.rbar();
        let height = (target * c0.powf(rbar) / c2).powf(1.0 / (1.0 + rbar));
        let widths = self.beta.iter().map(|b| (height / c0).powf(1.0 / b)).collect();
        Perturbation { height, widths }
    }

    /// Smallest base density value on the box where a perturbation with the
    /// given widths lives.
    pub fn floor_value(&self, widths: &[f64]) -> f64 {
        widths
            .iter()
            .map(|w| std_normal_pdf(1.5 * w / self.sigma) / self.sigma)
            .product()
    }

    pub fn check_perturbation(&self, p: &Perturbation) -> Result<()> {
        if p.widths.len() != self.dim_count() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_count(),
                got: p.widths.len(),
            });
        }
        if p.widths.iter().any(|w| !(*w > 0.0 && *w <= MAX_AXIS_BANDWIDTH)) {
            return Err(invalid("widths", "axis bandwidths must lie in (0, 2/3]"));
        }
        let peak: f64 = (0..self.dim_count())
            .map(|j| 0.5 * self.l[j] * self.shape_sup(j))
            .product();
        if !(p.height > 0.0 && p.height * peak <= self.floor_value(&p.widths)) {
            return Err(invalid("height", format!("{} breaks positivity", p.height)));
        }
        Ok(())
    }

    pub fn perturbed(&self, p: Perturbation) -> Result<Self> {
        if self.perturbation.is_some() {
            return Err(invalid("perturbation", "model is already perturbed"));
        }
        self.check_perturbation(&p)?;
        let mut out = self.clone();
        out.perturbation = Some(p);
        Ok(out)
    }

    /// Perturbed member at total variation `eps` from the base.
    pub fn worst_pair(&self, eps: f64) -> Result<Self> {
        // the system is written for the L1 distance
        self.perturbed(self.solve_system(2.0 * eps))
    }

    /// `|theta(p0) - theta(p1)| = h prod_j (L_j / 2) |g_j(0)|`.
    pub fn theta_gap(&self, p: &Perturbation) -> f64 {
        p.height
            * (0..self.dim_count())
                .map(|j| 0.5 * self.l[j] * self.shape(j, 0.0).abs())
                .product::<f64>()
    }

    /// Total variation `(h / 2) c2 prod h_j` between base and perturbed member.
    pub fn tv_gap(&self, p: &Perturbation) -> f64 {
        let (_, c2) = self.system_constants();
        0.5 * p.height * c2 * p.widths.iter().product::<f64>()
    }

    pub fn base_density(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.x0)
            .map(|(v, c)| std_normal_pdf((v - c) / self.sigma) / self.sigma)
            .product()
    }

    pub fn perturbation_value(&self, x: &[f64]) -> f64 {
        match &self.perturbation {
            None => 0.0,
            Some(p) => {
                let mut acc = p.height;
                for j in 0..self.dim_count() {
                    acc *= 0.5 * self.l[j] * self.shape(j, (x[j] - self.x0[j]) / p.widths[j]);
                    if acc == 0.0 {
                        break;
                    }
                }
                acc
            }
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.base_density(x) + self.perturbation_value(x)
    }

    fn integration_box(&self) -> Vec<(f64, f64)> {
        self.x0
            .iter()
            .map(|c| (c - BOX_SIGMAS * self.sigma, c + BOX_SIGMAS * self.sigma))
            .collect()
    }

    fn quadrature_intervals(&self) -> usize {
        match self.dim_count() {
            1 => 20_000,
            2 => 600,
            _ => 120,
        }
    }

    /// `int f p` over `bounds` by tensor Simpson quadrature; the perturbation
    /// is integrated on its own box so narrow bumps are resolved.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F, bounds: &[(f64, f64)]) -> f64 {
        let n = self.quadrature_intervals();
        let mut acc = box_quadrature(|x| f(x) * self.base_density(x), bounds, n);
        if let Some(p) = &self.perturbation {
            let inner: Vec<(f64, f64)> = bounds
                .iter()
                .zip(p.widths.iter().zip(&self.x0))
                .map(|((a, b), (w, c))| (a.max(c - 1.5 * w), b.min(c + 0.5 * w)))
                .collect();
            acc += box_quadrature(|x| f(x) * self.perturbation_value(x), &inner, n);
        }
        acc
    }

    pub fn total_mass(&self) -> f64 {
        self.integrate(|_| 1.0, &self.integration_box())
    }
}

impl StatModel for AnisotropicDensity {
    fn tag(&self) -> &'static str {
        "anisotropic"
    }

    fn dim(&self) -> usize {
        self.dim_count()
    }

    fn theta(&self) -> f64 {
        self.density(&self.x0)
    }

    fn theta_range(&self) -> ThetaRange {
        self.range
    }

    fn sample(&self, rng: &mut CounterRng, out: &mut [f64]) {
        loop {
            for (o, c) in out.iter_mut().zip(&self.x0) {
                *o = c + self.sigma * rng.sample::<f64, _>(StandardNormal);
            }
            if self.perturbation.is_none() {
                return;
            }
            let ratio = self.density(out) / (2.0 * self.base_density(out));
            if rng.random::<f64>() < ratio {
                return;
            }
        }
    }

    fn expectation(&self, rep: &Representer) -> Result<f64> {
        if rep.dim() != self.dim_count() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_count(),
                got: rep.dim(),
            });
        }
        let bounds = clip_to_support(&self.integration_box(), rep);
        Ok(self.integrate(|x| rep.eval(x), &bounds))
    }

    fn discretize(&self, resolution: usize) -> Result<DiscreteDist> {
        let bounds: Vec<(f64, f64)> = self
            .x0
            .iter()
            .map(|c| (c - 6.0 * self.sigma, c + 6.0 * self.sigma))
            .collect();
        discretize_density(|x| self.density(x), &bounds, resolution)
    }
}
