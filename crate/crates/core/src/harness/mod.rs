//! Monte Carlo risk experiments over `(alpha, n)` grids, log-log rate fits
//! and result files.
//!
//! Every cell draws `R` replicates. Replicate `r` of cell `(alpha, n)` reads
//! observation `i` from the stream `(cell seed, r, i)`: the data point first,
//! then the privatization coin. Replicates are spread over the rayon pool and
//! merged in index order, so results do not depend on the thread count.

mod config;
mod fit;
mod io;
mod run;
mod sweep;

pub use config::{load_config, parse_config, EstimatorSpec, ExperimentConfig, MIN_REPLICATES};
pub use fit::{fit_rate, rate_stability, RateFit, StabilityReport, MIN_FIT_CELLS};
pub use io::{csv_path, load_cells, load_report, meta_path, persist};
pub use run::{
    cell_seed, run_experiment, run_experiment_with_threads, theory_slope, CellFlag, CellPlan,
    RiskCell, RiskReport,
};
pub use sweep::{alpha_sweep, matched_n, AlphaSweep, SweepRow, SweepRule};
