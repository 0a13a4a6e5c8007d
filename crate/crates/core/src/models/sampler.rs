use crate::error::{invalid, Result};

/// Inverse-CDF sampler for a density tabulated on an equally spaced grid.
///
/// Cell masses come from the trapezoid rule; inside a cell the draw is
/// uniform, so the sampled law has a piecewise constant density whose error
/// is of the order of the squared cell width.
#[derive(Debug, Clone)]
pub struct GridSampler {
    lo: f64,
    width: f64,
    cdf: Vec<f64>,
}

impl GridSampler {
    pub fn new<F: Fn(f64) -> f64>(density: F, lo: f64, hi: f64, cells: usize) -> Result<Self> {
        if !(lo < hi) || cells == 0 {
            return Err(invalid("grid", "need lo < hi and at least one cell"));
        }
        let width = (hi - lo) / cells as f64;
        let mut prev = density(lo).max(0.0);
        let mut cdf = Vec::with_capacity(cells + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 1..=cells {
            let next = density(lo + width * i as f64).max(0.0);
            acc += 0.5 * (prev + next) * width;
            cdf.push(acc);
            prev = next;
        }
        if !(acc > 0.0) {
            return Err(invalid("density", "has no mass on the grid"));
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(Self { lo, width, cdf })
    }

    /// Width of one grid cell.
    pub fn cell_width(&self) -> f64 {
        self.width
    }

    #[inline]
    pub fn sample(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|c| *c <= u).clamp(1, self.cdf.len() - 1) - 1;
        let (a, b) = (self.cdf[i], self.cdf[i + 1]);
        let frac = if b > a { (u - a) / (b - a) } else { 0.5 };
        self.lo + self.width * (i as f64 + frac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use rand::Rng;

    #[test]
    fn triangular_density_quantiles() {
        // p(x) = 2x on [0, 1]; F^-1(u) = sqrt(u)
        let s = GridSampler::new(|x| 2.0 * x, 0.0, 1.0, 1 << 12).unwrap();
        for u in [0.01, 0.25, 0.5, 0.9, 0.999] {
            assert!((s.sample(u) - u.sqrt()).abs() < 1e-3);
        }
        let mut rng = CounterRng::from_seed(3);
        let n = 200_000;
        let mean = (0..n).map(|_| s.sample(rng.random())).sum::<f64>() / n as f64;
        // mean 2/3, sd sqrt(1/18)
        assert!((mean - 2.0 / 3.0).abs() < 4.0 * (1.0f64 / 18.0).sqrt() / (n as f64).sqrt());
    }
}
