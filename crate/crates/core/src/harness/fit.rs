use serde::{Deserialize, Serialize};

use super::run::{CellFlag, RiskCell};
use crate::channels::PrivacyLevel;
use crate::error::{invalid, Error, Result};
use crate::models::LossFn;

/// Least-squares line through `(log n, log risk)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub alpha: f64,
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub intercept_se: f64,
    pub cells: usize,
}

pub const MIN_FIT_CELLS: usize = 4;

/// Fits log risk on log n over the unflagged cells of one alpha.
pub fn fit_rate(cells: &[RiskCell]) -> Result<RateFit> {
    let usable: Vec<&RiskCell> = cells.iter().filter(|c| c.flag == CellFlag::Ok).collect();
    if usable.len() < MIN_FIT_CELLS {
        return Err(Error::TooFewCells {
            needed: MIN_FIT_CELLS,
            got: usable.len(),
        });
    }
    let alpha = usable[0].alpha;
    if usable.iter().any(|c| c.alpha != alpha) {
        return Err(invalid("cells", "mixes privacy levels"));
    }
    if let Some(c) = usable.iter().find(|c| !(c.risk > 0.0)) {
        return Err(Error::NonPositiveRisk { n: c.n, risk: c.risk });
    }
    let x: Vec<f64> = usable.iter().map(|c| (c.n as f64).ln()).collect();
    let y: Vec<f64> = usable.iter().map(|c| c.risk.ln()).collect();
    let k = x.len() as f64;
    let xm = x.iter().sum::<f64>() / k;
    let ym = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|v| (v - xm).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(invalid("cells", "sample sizes must differ"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let s2 = rss / (k - 2.0);
    Ok(RateFit {
        alpha,
        slope,
        slope_se: (s2 / sxx).sqrt(),
        intercept,
        intercept_se: (s2 * (1.0 / k + xm * xm / sxx)).sqrt(),
        cells: usable.len(),
    })
}

/// Risk divided by the loss at the theoretical rate, per cell.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub n: Vec<u64>,
    pub ratio: Vec<f64>,
    pub ratio_se: Vec<f64>,
    /// Ratio at the smallest `n`.
    pub reference: f64,
    pub passed: bool,
}

/// Checks that `risk / l((z_factor / sqrt n)^(1 / (1 + rbar)))` never rises
/// above its value at the smallest `n` by more than two standard errors.
pub fn rate_stability(cells: &[RiskCell], loss: &LossFn, rbar: f64) -> Result<StabilityReport> {
    let mut usable: Vec<&RiskCell> = cells.iter().filter(|c| c.flag == CellFlag::Ok).collect();
    if usable.is_empty() {
        return Err(Error::TooFewCells { needed: 1, got: 0 });
    }
    usable.sort_by_key(|c| c.n);
    let mut out = StabilityReport {
        n: Vec::new(),
        ratio: Vec::new(),
        ratio_se: Vec::new(),
        reference: 0.0,
        passed: true,
    };
    for c in &usable {
        let level = PrivacyLevel::new(c.alpha)?;
        let rate = (level.z_factor() / (c.n as f64).sqrt()).powf(1.0 / (1.0 + rbar));
        let scale = loss.eval(rate);
        out.n.push(c.n);
        out.ratio.push(c.risk / scale);
        out.ratio_se.push(c.se / scale);
    }
    out.reference = out.ratio[0];
    let se0 = out.ratio_se[0];
    out.passed = out
        .ratio
        .iter()
        .zip(&out.ratio_se)
        .all(|(r, se)| *r <= out.reference + 2.0 * (se * se + se0 * se0).sqrt());
    Ok(out)
}
