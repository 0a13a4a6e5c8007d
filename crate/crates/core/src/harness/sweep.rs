use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::CellPlan;
use crate::channels::PrivacyLevel;
use crate::error::{invalid, Result};
use crate::representers::RepresenterFamily;

/// How sample sizes are matched across privacy levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepRule {
    /// Equal `n (e^alpha - 1)^2`.
    ExpM1,
    /// Equal `n alpha^2`.
    Alpha,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub n: u64,
    pub risk: f64,
    pub se: f64,
    /// Risk over the reference risk; absent for the reference row.
    pub ratio: Option<f64>,
    pub ratio_se: Option<f64>,
    /// `alpha > 1`, where the two effective sizes part ways.
    pub large_alpha: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaSweep {
    pub rule: SweepRule,
    pub reference_alpha: f64,
    pub reference_n: u64,
    pub rows: Vec<SweepRow>,
}

fn scale(rule: SweepRule, alpha: f64) -> Result<f64> {
    let level = PrivacyLevel::new(alpha)?;
    Ok(match rule {
        SweepRule::ExpM1 => level.expm1(),
        SweepRule::Alpha => alpha,
    })
}

/// Sample size at `alpha` matching `n_ref` observations at `alpha_ref`.
pub fn matched_n(n_ref: u64, alpha_ref: f64, alpha: f64, rule: SweepRule) -> Result<u64> {
    let r = scale(rule, alpha_ref)? / scale(rule, alpha)?;
    Ok(((n_ref as f64) * r * r).round().max(1.0) as u64)
}

/// Runs one cell per alpha of `config` at matched sample sizes. The first
/// alpha is the reference and runs at `n_ref`; `config.ns` is not used.
pub fn alpha_sweep(config: &ExperimentConfig, n_ref: u64, rule: SweepRule) -> Result<AlphaSweep> {
    config.validate()?;
    if n_ref == 0 {
        return Err(invalid("n_ref", "must be positive"));
    }
    let family = RepresenterFamily::new(config.family.clone())?;
    let cached = if config.model.tracks_bandwidth() {
        None
    } else {
        Some(config.model.build(&[])?)
    };
    let alpha_ref = config.alphas[0];
    let mut rows: Vec<SweepRow> = Vec::with_capacity(config.alphas.len());
    for &alpha in &config.alphas {
        let n = matched_n(n_ref, alpha_ref, alpha, rule)?;
        let cell = CellPlan::new(config, &family, cached.as_ref(), alpha, n)?.run(config.replicates)?;
        let (ratio, ratio_se) = match rows.first() {
            Some(r0) => {
                let q = cell.risk / r0.risk;
                let rel = ((cell.se / cell.risk).powi(2) + (r0.se / r0.risk).powi(2)).sqrt();
                (Some(q), Some(q * rel))
            }
            None => (None, None),
        };
        rows.push(SweepRow {
            alpha,
            n,
            risk: cell.risk,
            se: cell.se,
            ratio,
            ratio_se,
            large_alpha: alpha > 1.0,
        });
    }
    Ok(AlphaSweep {
        rule,
        reference_alpha: alpha_ref,
        reference_n: n_ref,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching() {
        assert_eq!(matched_n(1000, 0.2, 0.1, SweepRule::Alpha).unwrap(), 4000);
        let expm1 = matched_n(1000, 0.2, 0.1, SweepRule::ExpM1).unwrap();
        let oracle = 1000.0 * ((0.2f64.exp() - 1.0) / (0.1f64.exp() - 1.0)).powi(2);
        assert_eq!(expm1, oracle.round() as u64);
        assert_eq!(matched_n(1000, 0.5, 0.5, SweepRule::ExpM1).unwrap(), 1000);
    }
}
