//! The compactly supported bump `exp(-1 / (1 - 4u^2))` on `(-1/2, 1/2)` and
//! the scalings built from it.

use std::sync::OnceLock;

use crate::numeric::{holder_constant, jet, linspace, simpson};

/// Multiplier applied to numerically found Hölder constants, covering the
/// gap between a grid maximum and the true supremum.
pub const SAFETY: f64 = 1.05;

/// Points where the reciprocal would overflow are treated as outside.
const EDGE_CUTOFF: f64 = 700.0;

#[inline]
pub fn bump(u: f64) -> f64 {
    let w = 1.0 - 4.0 * u * u;
    if w <= 0.0 || 1.0 / w > EDGE_CUTOFF {
        0.0
    } else {
        (-1.0 / w).exp()
    }
}

/// Derivatives `bump^(0..=order)(u)`.
pub fn bump_derivatives(u: f64, order: usize) -> Vec<f64> {
    let w = 1.0 - 4.0 * u * u;
    if w <= 0.0 || 1.0 / w > EDGE_CUTOFF {
        return vec![0.0; order + 1];
    }
    // 1 - 4 (u + t)^2 as a series in t
    let mut poly = vec![0.0; order + 1];
    poly[0] = w;
    if order >= 1 {
        poly[1] = -8.0 * u;
    }
    if order >= 2 {
        poly[2] = -4.0;
    }
    let mut inv = jet::recip(&poly);
    inv.iter_mut().for_each(|c| *c = -*c);
    jet::derivatives(&jet::exp(&inv))
}

/// `bump^(k)(u)`.
pub fn bump_derivative(k: usize, u: f64) -> f64 {
    if k == 0 {
        bump(u)
    } else {
        bump_derivatives(u, k)[k]
    }
}

/// `int bump`.
pub fn bump_integral() -> f64 {
    static I0: OnceLock<f64> = OnceLock::new();
    *I0.get_or_init(|| simpson(bump, -0.5, 0.5, 100_000))
}

/// `max bump = bump(0) = e^-1`.
pub fn bump_max() -> f64 {
    (-1.0f64).exp()
}

const HOLDER_GRID: usize = 1201;

/// Grid estimate of the Hölder constant of `f` with exponent `e` on `[a, b]`.
pub fn grid_holder<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, e: f64) -> f64 {
    let xs = linspace(a, b, HOLDER_GRID);
    let vs: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
    holder_constant(&xs, &vs, e)
}

/// Hölder constant (exponent `e`) of the `b`-th derivative of the unscaled
/// difference `bump(y + 1) - bump(y)`.
pub fn difference_holder(b: usize, e: f64) -> f64 {
    grid_holder(
        |y| bump_derivative(b, y + 1.0) - bump_derivative(b, y),
        -1.5,
        0.5,
        e,
    )
}

/// Hölder constant (exponent `e`) of `bump^(b)`.
pub fn bump_holder(b: usize, e: f64) -> f64 {
    grid_holder(|u| bump_derivative(b, u), -0.5, 0.5, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        for u in [-0.3, -0.1, 0.0, 0.2, 0.4] {
            let d = bump_derivatives(u, 3);
            let step = 1e-5;
            for k in 0..3 {
                let fd = (bump_derivatives(u + step, k)[k] - bump_derivatives(u - step, k)[k])
                    / (2.0 * step);
                assert!((fd - d[k + 1]).abs() < 1e-6 * (1.0 + d[k + 1].abs()), "u={u} k={k}");
            }
        }
    }

    #[test]
    fn symmetry_and_peak() {
        assert!((bump(0.0) - bump_max()).abs() < 1e-16);
        assert_eq!(bump(0.5), 0.0);
        assert_eq!(bump(-0.7), 0.0);
        assert!((bump(0.2) - bump(-0.2)).abs() < 1e-16);
        // odd derivatives vanish at the centre
        assert_eq!(bump_derivatives(0.0, 3)[1], 0.0);
        assert_eq!(bump_derivatives(0.0, 3)[3], 0.0);
        // bump''(0) = -8 e^-1
        assert!((bump_derivatives(0.0, 2)[2] + 8.0 * bump_max()).abs() < 1e-14);
    }

    #[test]
    fn integral_against_trapezoid() {
        let n = 1 << 16;
        let h = 1.0 / n as f64;
        let trap: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * bump(-0.5 + h * i as f64)
            })
            .sum::<f64>()
            * h;
        assert!((bump_integral() - trap).abs() < 1e-12);
    }
}
