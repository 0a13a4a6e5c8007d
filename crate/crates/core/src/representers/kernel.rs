use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{poly_derivative, poly_eval, poly_mul, simpson};

/// Polynomial kernel `K(u) = q(u) (1 - u^2)^(m+1)` supported on `[-1, 1]`.
///
/// `q` is even, `int K = (-1)^m` and `int u^j K = 0` for `j = 1..=order`.
/// The boundary factor makes `K, K', ..., K^(m)` vanish at `+-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyKernel {
    order: usize,
    smoothness: usize,
    /// Coefficients of `K` in the monomial basis.
    coeffs: Vec<f64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `int_{-1}^{1} u^(2p) (1 - u^2)^n du`, expanded exactly.
fn even_moment(p: usize, n: usize) -> f64 {
    (0..=n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(n, i) * 2.0 / (2 * p + 2 * i + 1) as f64
        })
        .sum()
}

fn boundary_factor(n: usize) -> Vec<f64> {
    (0..n).fold(vec![1.0], |acc, _| poly_mul(&acc, &[1.0, 0.0, -1.0]))
}

/// Exact `int_{-1}^{1} P(u) du` for a polynomial in monomial coefficients.
pub(crate) fn integrate_poly(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == 0)
        .map(|(k, c)| c * 2.0 / (k + 1) as f64)
        .sum()
}

/// Builds the kernel with `order` vanishing moments and smoothness `m`.
pub fn build_kernel(order: usize, smoothness: usize) -> Result<PolyKernel> {
    let unknowns = order / 2 + 1;
    let n = smoothness + 1;
    let a = DMatrix::from_fn(unknowns, unknowns, |r, c| even_moment(r + c, n));
    let mut rhs = DVector::zeros(unknowns);
    rhs[0] = if smoothness % 2 == 0 { 1.0 } else { -1.0 };
    let singular = || Error::SingularMomentSystem {
        order,
        smoothness,
    };
    let sol = a.clone().lu().solve(&rhs).ok_or_else(singular)?;
    if sol.iter().any(|v| !v.is_finite()) || (&a * &sol - &rhs).amax() > 1e-9 {
        return Err(singular());
    }
    let mut q = vec![0.0; 2 * unknowns - 1];
    for (i, v) in sol.iter().enumerate() {
        q[2 * i] = *v;
    }
    Ok(PolyKernel {
        order,
        smoothness,
        coeffs: poly_mul(&q, &boundary_factor(n)),
    })
}

impl PolyKernel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients of the `j`-th derivative.
    pub fn derivative_coefficients(&self, j: usize) -> Vec<f64> {
        (0..j).fold(self.coeffs.clone(), |c, _| poly_derivative(&c))
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        if u.abs() <= 1.0 {
            poly_eval(&self.coeffs, u)
        } else {
            0.0
        }
    }

    pub fn eval_derivative(&self, j: usize, u: f64) -> f64 {
        if u.abs() <= 1.0 {
            poly_eval(&self.derivative_coefficients(j), u)
        } else {
            0.0
        }
    }

    /// `int u^j K(u) du`, exact.
    pub fn moment(&self, j: usize) -> f64 {
        let mut shifted = vec![0.0; j];
        shifted.extend_from_slice(&self.coeffs);
        integrate_poly(&shifted)
    }

    /// `sup_{|u| <= 1} |K^(j)(u)|`.
    ///
    /// Scans a fine grid and polishes every discrete local maximum by golden
    /// section search.
    pub fn sup_norm(&self, j: usize) -> f64 {
        max_abs_poly(&self.derivative_coefficients(j), -1.0, 1.0)
    }

    /// `int |u|^p |K(u)| du` by Simpson quadrature.
    pub fn abs_moment(&self, p: f64) -> f64 {
        simpson(|u| u.abs().powf(p) * self.eval(u).abs(), -1.0, 1.0, 20_000)
    }
}

/// Maximum of `|P|` over `[a, b]`.
pub(crate) fn max_abs_poly(coeffs: &[f64], a: f64, b: f64) -> f64 {
    const GRID: usize = 4096;
    let f = |u: f64| poly_eval(coeffs, u).abs();
    let step = (b - a) / GRID as f64;
    let values: Vec<f64> = (0..=GRID).map(|i| f(a + step * i as f64)).collect();
    let mut best = values.iter().cloned().fold(0.0, f64::max);
    for i in 1..GRID {
        if values[i] >= values[i - 1] && values[i] >= values[i + 1] {
            let x = a + step * i as f64;
            best = best.max(golden_max(&f, x - step, x + step));
        }
    }
    best
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epanechnikov() {
        let k = build_kernel(0, 0).unwrap();
        let c = k.coefficients();
        assert!((c[0] - 0.75).abs() < 1e-14);
        assert!(c[1].abs() < 1e-14);
        assert!((c[2] + 0.75).abs() < 1e-14);
        assert!((k.sup_norm(0) - 0.75).abs() < 1e-14);
    }

    #[test]
    fn smooth_kernel_has_negative_mass() {
        let k = build_kernel(0, 1).unwrap();
        // int (1 - u^2)^2 = 16/15
        assert!((k.coefficients()[0] + 15.0 / 16.0).abs() < 1e-14);
        assert!((k.moment(0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn fourth_order_kernel() {
        let k = build_kernel(2, 0).unwrap();
        assert!((k.moment(0) - 1.0).abs() < 1e-12);
        assert!(k.moment(2).abs() < 1e-12);
        // q(u) = 15/32 (3 - 7u^2): K(0) = 45/32
        assert!((k.eval(0.0) - 45.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn even_moment_closed_forms() {
        assert!((even_moment(0, 1) - 4.0 / 3.0).abs() < 1e-15);
        assert!((even_moment(1, 1) - 4.0 / 15.0).abs() < 1e-15);
        assert!((even_moment(0, 2) - 16.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn sup_of_polynomial() {
        // 1 - 3u^2 on [-1,1]: max |.| = 2 at the ends
        assert!((max_abs_poly(&[1.0, 0.0, -3.0], -1.0, 1.0) - 2.0).abs() < 1e-14);
        // u - u^3 peaks at 1/sqrt 3
        let want = 2.0 / (3.0 * 3f64.sqrt());
        assert!((max_abs_poly(&[0.0, 1.0, 0.0, -1.0], -1.0, 1.0) - want).abs() < 1e-13);
    }
}
