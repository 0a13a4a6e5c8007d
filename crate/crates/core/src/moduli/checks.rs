use serde::Serialize;

use super::brute::{FiniteFamily, Metric, Modulus, ModulusTable};
use crate::channels::{BinaryChannel, Pushforward};
use crate::error::{invalid, Result};
use crate::representers::ConditionC;

/// Result of one inequality check over an `eps` grid. `worst` is the largest
/// amount by which the left side exceeded the right side (negative when the
/// inequality held everywhere with room to spare).
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub evaluations: usize,
    pub worst: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            evaluations: 0,
            worst: f64::NEG_INFINITY,
            passed: true,
        }
    }

    fn record(&mut self, lhs: f64, rhs: f64, slack: f64) {
        self.evaluations += 1;
        let gap = lhs - rhs;
        self.worst = self.worst.max(gap);
        if gap > slack || gap.is_nan() {
            self.passed = false;
        }
    }
}

fn value(m: Modulus) -> f64 {
    m.as_f64()
}

/// `omega_h(eps) <= omega_tv(eps) <= omega_h(sqrt(2 eps))`.
pub fn sandwich_check(family: &FiniteFamily, eps_grid: &[f64]) -> CheckOutcome {
    let tv = ModulusTable::new(family, Metric::Tv);
    let h = ModulusTable::new(family, Metric::Hellinger);
    let mut out = CheckOutcome::new("sandwich");
    for &eps in eps_grid {
        let w_tv = value(tv.at(eps));
        out.record(value(h.at(eps)), w_tv, 0.0);
        out.record(w_tv, value(h.at((2.0 * eps).sqrt())), 0.0);
    }
    out
}

/// The modulus never decreases along the sorted grid.
pub fn monotone_check(family: &FiniteFamily, metric: Metric, eps_grid: &[f64]) -> CheckOutcome {
    let table = ModulusTable::new(family, metric);
    let mut grid = eps_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut out = CheckOutcome::new("monotone");
    for w in grid.windows(2) {
        out.record(value(table.at(w[0])), value(table.at(w[1])), 0.0);
    }
    out
}

/// `omega(k eps) <= k^2 omega(eps) + slack` for the Hellinger modulus of the
/// family pushed through `channel`.
pub fn homogeneity_check(
    family: &FiniteFamily,
    channel: &dyn Pushforward,
    factors: &[f64],
    eps_grid: &[f64],
    slack: f64,
) -> Result<CheckOutcome> {
    let table = ModulusTable::new(&family.pushforward(channel)?, Metric::Hellinger);
    let mut out = CheckOutcome::new("homogeneity");
    for &eps in eps_grid {
        let base = value(table.at(eps));
        for &k in factors {
            if !(k >= 1.0) {
                return Err(invalid("factors", "must be at least 1"));
            }
            out.record(value(table.at(k * eps)), k * k * base, slack);
        }
    }
    Ok(out)
}

/// `omega_tv(eps) / eps` stays bounded away from zero on the grid. `worst`
/// holds the negated smallest ratio.
pub fn linear_lower_bound_check(family: &FiniteFamily, eps_grid: &[f64]) -> CheckOutcome {
    let table = ModulusTable::new(family, Metric::Tv);
    let mut out = CheckOutcome::new("linear_lower_bound");
    for &eps in eps_grid.iter().filter(|e| **e > 0.0) {
        out.record(0.0, value(table.at(eps)) / eps, 0.0);
        if out.worst >= 0.0 {
            out.passed = false;
        }
    }
    out
}

/// `omega_tv(eps) <= 4 D0 eps^(1 / (1 + rbar))` for
/// `eps <= h0^((1 + rbar) max t)`; larger grid points are skipped.
pub fn condition_c_bound_check(
    family: &FiniteFamily,
    condition: &ConditionC,
    eps_grid: &[f64],
) -> CheckOutcome {
    let table = ModulusTable::new(family, Metric::Tv);
    let rbar = condition.rbar();
    let t_max = condition.t.iter().copied().fold(0.0, f64::max);
    let eps_max = condition.h0.powf((1.0 + rbar) * t_max);
    let mut out = CheckOutcome::new("condition_c_bound");
    for &eps in eps_grid.iter().filter(|e| **e <= eps_max) {
        out.record(
            value(table.at(eps)),
            4.0 * condition.d0 * eps.powf(1.0 / (1.0 + rbar)),
            1e-12,
        );
    }
    out
}

/// `omega_tv(eps e^(-alpha/2)) <= omega_h^Q(eps)` for the binary channel `Q`.
pub fn private_hellinger_check(
    family: &FiniteFamily,
    channel: &BinaryChannel,
    eps_grid: &[f64],
) -> Result<CheckOutcome> {
    let tv = ModulusTable::new(family, Metric::Tv);
    let h = ModulusTable::new(&family.pushforward(channel)?, Metric::Hellinger);
    let shrink = (-0.5 * channel.level().alpha()).exp();
    let mut out = CheckOutcome::new("private_hellinger");
    for &eps in eps_grid {
        out.record(value(tv.at(eps * shrink)), value(h.at(eps)), 1e-12);
    }
    Ok(out)
}
