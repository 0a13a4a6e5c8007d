use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::fit::RateFit;
use super::run::{RiskCell, RiskReport};
use crate::error::{Error, Result};

/// Report fields that do not fit the per-cell records.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    theory_slope: f64,
    fits: Vec<RateFit>,
    config: ExperimentConfig,
}

/// CSV summary written next to a JSON-Lines results file.
pub fn csv_path(results: &Path) -> PathBuf {
    results.with_extension("csv")
}

/// Metadata written next to a JSON-Lines results file.
pub fn meta_path(results: &Path) -> PathBuf {
    results.with_extension("meta.json")
}

/// Writes one JSON record per cell to `path`, a CSV with the same columns and
/// a metadata file holding the fits, theory slope and config. Existing files
/// are replaced.
pub fn persist(report: &RiskReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    for cell in &report.cells {
        serde_json::to_writer(&mut out, cell).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;

    let mut csv = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(csv_path(path))
        .map_err(csv_error)?;
    for cell in &report.cells {
        csv.serialize(cell).map_err(csv_error)?;
    }
    csv.flush()?;

    let meta = Sidecar {
        theory_slope: report.theory_slope,
        fits: report.fits.clone(),
        config: report.config.clone(),
    };
    let mut text = serde_json::to_string_pretty(&meta).map_err(std::io::Error::from)?;
    text.push('\n');
    std::fs::write(meta_path(path), text)?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn parse_error(line: usize, e: serde_json::Error) -> Error {
    Error::Parse {
        line,
        column: e.column(),
        message: e.to_string(),
    }
}

/// Reads the cells of a JSON-Lines results file.
pub fn load_cells(path: impl AsRef<Path>) -> Result<Vec<RiskCell>> {
    let reader = BufReader::new(File::open(path)?);
    let mut cells = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        cells.push(serde_json::from_str(&line).map_err(|e| parse_error(i + 1, e))?);
    }
    Ok(cells)
}

/// Inverse of [`persist`]; needs the metadata file next to `path`.
pub fn load_report(path: impl AsRef<Path>) -> Result<RiskReport> {
    let path = path.as_ref();
    let mut cells = load_cells(path)?;
    let text = std::fs::read_to_string(meta_path(path))?;
    let meta: Sidecar = serde_json::from_str(&text).map_err(|e| parse_error(e.line(), e))?;
    for c in &mut cells {
        c.replicates = meta.config.replicates;
    }
    Ok(RiskReport {
        config: meta.config,
        cells,
        fits: meta.fits,
        theory_slope: meta.theory_slope,
    })
}
