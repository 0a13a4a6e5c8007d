use serde::{Deserialize, Serialize};

use super::brute::Metric;
use super::{analytic_modulus, ModulusCurve};
use crate::channels::{audit_privacy, tv_distance, DiscreteChannel, DiscreteDist, PrivacyLevel};
use crate::error::{invalid, Error, Result};

/// Largest product output space [`contraction_check`] will enumerate.
const MAX_OUTCOMES: u128 = 1_000_000;

/// Admissible region `(eta, n)` and the Hellinger-branch constant of the
/// lower-bound curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundConfig {
    pub eta0: f64,
    pub eps0: f64,
    pub c: f64,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        Self {
            eta0: 1.0,
            eps0: 1.0,
            c: 0.5,
        }
    }
}

/// `(eta / 2) l(max[omega_tv((1 - eta) / sqrt(2 n (e^a - 1)^2)), omega_h(c sqrt(|ln eta| / n))] / 2)`.
pub fn lower_bound_curve<L: Fn(f64) -> f64>(
    n: u64,
    level: PrivacyLevel,
    eta: f64,
    loss: L,
    curve_tv: &ModulusCurve,
    curve_h: &ModulusCurve,
    config: LowerBoundConfig,
) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("eta", format!("{eta} is outside (0, 1)")));
    }
    if eta >= config.eta0 {
        return Err(invalid("eta", format!("{eta} is not below eta0 = {}", config.eta0)));
    }
    let log_eta = eta.ln().abs();
    let n_f = n as f64;
    if !(n_f > log_eta / config.eps0) {
        return Err(invalid("n", format!("{n} is not above |ln eta| / eps0")));
    }
    if curve_tv.metric != Metric::Tv || curve_h.metric != Metric::Hellinger {
        return Err(invalid("curve", "expected a total variation and a Hellinger curve"));
    }
    let tv_arg = (1.0 - eta) / (2.0 * n_f).sqrt() / level.expm1();
    let h_arg = config.c * (log_eta / n_f).sqrt();
    let inner = analytic_modulus(curve_tv, tv_arg)?.max(analytic_modulus(curve_h, h_arg)?);
    Ok(0.5 * eta * loss(0.5 * inner))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionReport {
    /// Total variation between the privatized product measures.
    pub lhs: f64,
    /// `sqrt(2 n (e^alpha - 1)^2) d_tv(p0, p1)`.
    pub rhs: f64,
    pub passed: bool,
}

/// Compares the total variation of the `n`-fold privatized samples, computed
/// by enumerating the product output space, against
/// `sqrt(2n) (e^alpha - 1) d_tv(p0, p1)`.
///
/// `channels` holds one marginal per coordinate, or a single channel reused
/// for all of them.
pub fn contraction_check(
    channels: &[DiscreteChannel],
    p0: &DiscreteDist,
    p1: &DiscreteDist,
    n: usize,
    level: PrivacyLevel,
) -> Result<ContractionReport> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    let marginals: Vec<&DiscreteChannel> = match channels.len() {
        1 => vec![&channels[0]; n],
        len if len == n => channels.iter().collect(),
        len => return Err(Error::DimensionMismatch { expected: n, got: len }),
    };
    let mut outcomes: u128 = 1;
    for ch in &marginals {
        outcomes = outcomes.saturating_mul(ch.n_outputs() as u128);
    }
    if outcomes > MAX_OUTCOMES {
        return Err(Error::EnumerationTooLarge(outcomes));
    }
    for ch in &marginals {
        let audit = audit_privacy(ch, level)?;
        if !audit.passed {
            return Err(Error::NotPrivate {
                max_log_ratio: audit.max_log_ratio,
                alpha: level.alpha(),
            });
        }
    }
    let push = |ch: &DiscreteChannel, p: &DiscreteDist| -> Result<Vec<f64>> {
        let mut out = vec![0.0; ch.n_outputs()];
        for (x, w) in p.iter() {
            let i = ch.input_index(x).ok_or_else(|| Error::UnknownAtom(x.to_vec()))?;
            for (o, q) in out.iter_mut().zip(ch.row(i)) {
                *o += w * q;
            }
        }
        Ok(out)
    };
    let q0 = marginals.iter().map(|ch| push(ch, p0)).collect::<Result<Vec<_>>>()?;
    let q1 = marginals.iter().map(|ch| push(ch, p1)).collect::<Result<Vec<_>>>()?;

    let mut idx = vec![0usize; n];
    let mut l1 = 0.0;
    loop {
        let (mut a, mut b) = (1.0, 1.0);
        for k in 0..n {
            a *= q0[k][idx[k]];
            b *= q1[k][idx[k]];
        }
        l1 += (a - b).abs();
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < q0[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    let lhs = 0.5 * l1;
    let rhs = (2.0 * n as f64).sqrt() * level.expm1() * tv_distance(p0, p1);
    Ok(ContractionReport {
        lhs,
        rhs,
        passed: lhs <= rhs + 1e-12,
    })
}
