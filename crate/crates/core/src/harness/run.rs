use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EstimatorSpec, ExperimentConfig};
use super::fit::{fit_rate, RateFit};
use crate::channels::{BinaryChannel, PrivacyLevel};
use crate::error::{invalid, Error, Result};
use crate::estimators::{build_plan, delta_tuning, BinarySearchPlan, LinearProbMap, ThetaRange};
use crate::models::{LossFn, StatModel};
use crate::moduli::binary_channel_modulus;
use crate::representers::{select_bandwidth, RepresenterFamily};
use crate::rng::{derive_seed, StreamKey};

/// Left endpoints scanned when tuning the binary search grid.
const MODULUS_GRID: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellFlag {
    Ok,
    /// The bandwidth rule asked for `h > h0`; the cell is left out of fits.
    Clamped,
}

/// Monte Carlo summary of one `(alpha, n)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskCell {
    pub alpha: f64,
    pub n: u64,
    pub risk: f64,
    pub se: f64,
    pub flag: CellFlag,
    /// Seed of this cell's replicate streams.
    pub seed: u64,
    #[serde(skip)]
    pub replicates: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub config: ExperimentConfig,
    pub cells: Vec<RiskCell>,
    /// One fit per alpha with enough unflagged cells.
    pub fits: Vec<RateFit>,
    pub theory_slope: f64,
}

impl RiskReport {
    pub fn cells_for(&self, alpha: f64) -> Vec<RiskCell> {
        self.cells.iter().filter(|c| c.alpha == alpha).cloned().collect()
    }

    pub fn fit_for(&self, alpha: f64) -> Option<&RateFit> {
        self.fits.iter().find(|f| f.alpha == alpha)
    }
}

/// Log-log slope of `l(eps^(1 / (1 + rbar)))` at `eps = n^-1/2`, using the
/// small-error exponent of the loss.
pub fn theory_slope(family: &RepresenterFamily, loss: &LossFn) -> f64 {
    -loss.small_error_exponent() * family.condition().rate_exponent() / 2.0
}

/// Seed of the cell `(alpha, n)` under `master`.
pub fn cell_seed(master: u64, alpha: f64, n: u64) -> u64 {
    derive_seed(derive_seed(master, alpha.to_bits()), n)
}

enum CellEstimator {
    Mean { shift: f64, project: bool },
    Search(BinarySearchPlan),
}

/// Everything needed to simulate replicates of one cell.
pub struct CellPlan {
    pub alpha: f64,
    pub n: u64,
    pub seed: u64,
    pub flag: CellFlag,
    pub bandwidth: Vec<f64>,
    model: Arc<dyn StatModel>,
    channel: BinaryChannel,
    range: ThetaRange,
    estimator: CellEstimator,
    loss: LossFn,
}

impl CellPlan {
    pub fn new(
        config: &ExperimentConfig,
        family: &RepresenterFamily,
        cached: Option<&Arc<dyn StatModel>>,
        alpha: f64,
        n: u64,
    ) -> Result<Self> {
        let level = PrivacyLevel::new(alpha)?;
        let bw = select_bandwidth(family.condition(), n, level);
        let model = match cached {
            Some(m) => Arc::clone(m),
            None => config.model.build(&bw.h)?,
        };
        if model.dim() != family.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: family.input_dim(),
                got: model.dim(),
            });
        }
        let channel = BinaryChannel::new(family.instantiate(&bw.h)?, level)?;
        let range = model.theta_range();
        let estimator = match &config.estimator {
            EstimatorSpec::SampleMean { shift, project } => CellEstimator::Mean {
                shift: *shift,
                project: *project,
            },
            EstimatorSpec::BinarySearch { delta } => {
                let map = LinearProbMap::for_channel(&channel, range)?;
                let delta = match delta {
                    Some(d) => *d,
                    None => {
                        let eps = 1.0 / (n as f64).sqrt();
                        let omega = binary_channel_modulus(&map, range, eps, MODULUS_GRID)?;
                        delta_tuning(omega, config.loss.doubling_constant())?
                    }
                };
                CellEstimator::Search(build_plan(delta, range, &map)?)
            }
        };
        Ok(Self {
            alpha,
            n,
            seed: cell_seed(config.seed, alpha, n),
            flag: if bw.clamped { CellFlag::Clamped } else { CellFlag::Ok },
            bandwidth: bw.h,
            model,
            channel,
            range,
            estimator,
            loss: config.loss,
        })
    }

    pub fn theta(&self) -> f64 {
        self.model.theta()
    }

    pub fn channel(&self) -> &BinaryChannel {
        &self.channel
    }

    /// Number of `+z0` releases in replicate `r`. Observation `i` draws its
    /// data point first and then the privatization coin from its own stream.
    pub fn successes(&self, replicate: u64) -> Result<u64> {
        let streams = StreamKey::new(self.seed, replicate).streams();
        let mut x = vec![0.0; self.model.dim()];
        let mut hits = 0u64;
        for i in 0..self.n {
            let mut rng = streams.observation(i);
            self.model.sample(&mut rng, &mut x);
            let p = self.channel.success_probability(&x)?;
            if rng.random::<f64>() < p {
                hits += 1;
            }
        }
        Ok(hits)
    }

    pub fn estimate(&self, hits: u64) -> f64 {
        let n = self.n as f64;
        match &self.estimator {
            CellEstimator::Mean { shift, project } => {
                let zbar = self.channel.z0() * (2.0 * hits as f64 - n) / n;
                if *project {
                    self.range.project(zbar + shift)
                } else {
                    zbar + shift
                }
            }
            CellEstimator::Search(plan) => plan.estimate_from_fraction(hits as f64 / n),
        }
    }

    /// Loss of replicate `r`.
    pub fn replicate_loss(&self, replicate: u64) -> Result<f64> {
        let est = self.estimate(self.successes(replicate)?);
        Ok(self.loss.eval((est - self.theta()).abs()))
    }

    /// Runs `replicates` replicates on the current rayon pool and merges them
    /// in replicate order.
    pub fn run(&self, replicates: u64) -> Result<RiskCell> {
        if replicates < 2 {
            return Err(invalid("replicates", "need at least two for a standard error"));
        }
        let losses = (0..replicates)
            .into_par_iter()
            .map(|r| self.replicate_loss(r))
            .collect::<Result<Vec<f64>>>()?;
        let r = replicates as f64;
        let mean = losses.iter().sum::<f64>() / r;
        let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (r - 1.0);
        Ok(RiskCell {
            alpha: self.alpha,
            n: self.n,
            risk: mean,
            se: (var / r).sqrt(),
            flag: self.flag,
            seed: self.seed,
            replicates,
        })
    }
}

/// Runs every `(alpha, n)` cell of `config` and fits a rate per alpha.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RiskReport> {
    config.validate()?;
    let family = RepresenterFamily::new(config.family.clone())?;
    let cached = if config.model.tracks_bandwidth() {
        None
    } else {
        Some(config.model.build(&[])?)
    };
    let mut cells = Vec::with_capacity(config.alphas.len() * config.ns.len());
    for &alpha in &config.alphas {
        for &n in &config.ns {
            let plan = CellPlan::new(config, &family, cached.as_ref(), alpha, n)?;
            cells.push(plan.run(config.replicates)?);
        }
    }
    let fits = fits_for(&config.alphas, &cells);
    Ok(RiskReport {
        config: config.clone(),
        cells,
        fits,
        theory_slope: theory_slope(&family, &config.loss),
    })
}

/// As [`run_experiment`], on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(config: &ExperimentConfig, threads: usize) -> Result<RiskReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid("threads", e.to_string()))?;
    pool.install(|| run_experiment(config))
}

pub(crate) fn fits_for(alphas: &[f64], cells: &[RiskCell]) -> Vec<RateFit> {
    alphas
        .iter()
        .filter_map(|&a| {
            let mine: Vec<RiskCell> = cells.iter().filter(|c| c.alpha == a).cloned().collect();
            fit_rate(&mine).ok()
        })
        .collect()
}
