//! Small numerical helpers shared by the model and kernel code.

/// Composite Simpson rule on `[a, b]` with `intervals` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Evenly spaced grid with `points` nodes including both endpoints.
pub fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (points - 1) as f64;
            (0..points).map(|i| a + step * i as f64).collect()
        }
    }
}

/// Largest ratio `|v_i - v_j| / |x_i - x_j|^exponent` over all grid pairs.
///
/// With `exponent == 0` this is the oscillation `max v - min v`.
pub fn holder_constant(xs: &[f64], values: &[f64], exponent: f64) -> f64 {
    debug_assert_eq!(xs.len(), values.len());
    if exponent == 0.0 {
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        return (max - min).max(0.0);
    }
    let mut best = 0.0f64;
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let dx = (xs[i] - xs[j]).abs();
            if dx > 0.0 {
                best = best.max((values[i] - values[j]).abs() / dx.powf(exponent));
            }
        }
    }
    best
}

/// Bisection root finder for a function that changes sign on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if (f_mid <= 0.0) == (f_lo <= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Horner evaluation; `coeffs[k]` multiplies `x^k`.
#[inline]
pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Truncated Taylor series arithmetic, used to differentiate the smooth bump
/// functions of the density models exactly to any order.
pub mod jet {
    /// Coefficients `c[k]` of `sum c[k] t^k`.
    pub type Series = Vec<f64>;

    pub fn mul(a: &[f64], b: &[f64]) -> Series {
        let n = a.len().min(b.len());
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..(n - i) {
                out[i + j] += a[i] * b[j];
            }
        }
        out
    }

    /// Series of `1 / a`, requires `a[0] != 0`.
    pub fn recip(a: &[f64]) -> Series {
        let n = a.len();
        let mut out = vec![0.0; n];
        out[0] = 1.0 / a[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| a[j] * out[k - j]).sum();
            out[k] = -s / a[0];
        }
        out
    }

    /// Series of `exp(a)`.
    pub fn exp(a: &[f64]) -> Series {
        let n = a.len();
        let mut out = vec![0.0; n];
        out[0] = a[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * out[k - j]).sum();
            out[k] = s / k as f64;
        }
        out
    }

    /// Converts Taylor coefficients into derivatives `f^{(k)}`.
    pub fn derivatives(series: &[f64]) -> Vec<f64> {
        let mut fact = 1.0;
        series
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 4);
        let exact = (16.0 / 4.0 - 4.0 + 2.0) - (1.0 / 4.0 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn jet_exp_matches_known_derivatives() {
        // exp(t^2) at 0: derivatives 1, 0, 2, 0, 12
        let d = jet::derivatives(&jet::exp(&[0.0, 0.0, 1.0, 0.0, 0.0]));
        let want = [1.0, 0.0, 2.0, 0.0, 12.0];
        for (a, b) in d.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn jet_recip_of_geometric() {
        let r = jet::recip(&[1.0, -1.0, 0.0, 0.0]);
        assert_eq!(r, vec![1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn holder_zero_exponent_is_oscillation() {
        let xs = [0.0, 1.0, 2.0];
        assert_eq!(holder_constant(&xs, &[1.0, -2.0, 0.5], 0.0), 3.0);
        assert_eq!(holder_constant(&xs, &[0.0, 1.0, 2.0], 1.0), 1.0);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 80);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }
}
