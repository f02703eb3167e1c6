use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One measured quantity. Every experiment writes the same columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub point: usize,
    pub replicate: usize,
    pub parameter: String,
    pub sweep_value: Option<f64>,
    pub seed: u64,
    pub sampler_seed: u64,
    pub n: usize,
    pub pattern: String,
    pub metric: String,
    pub measured: f64,
    /// The bound, target or floor `measured` is checked against.
    pub reference: Option<f64>,
    pub holds: Option<bool>,
    pub method: String,
    pub witness_size: Option<usize>,
    /// Certificate or error message, as JSON or plain text.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub point: usize,
    pub replicate: usize,
    pub message: String,
}

/// Least-squares fit of `log ε = slope · log δ + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    pub correlation: f64,
    pub points_used: usize,
    pub points_total: usize,
    /// Fewer than three points above the noise floor.
    pub inconclusive: bool,
}

/// Minimum number of above-floor points for a fit.
pub const MIN_FIT_POINTS: usize = 3;

/// Fits `log y` against `log x` over the pairs flagged as usable.
pub fn fit_loglog(points: &[(f64, f64, bool)]) -> FitSummary {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.2 && p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let k = used.len();
    let mut fit = FitSummary {
        slope: f64::NAN,
        intercept: f64::NAN,
        correlation: f64::NAN,
        points_used: k,
        points_total: points.len(),
        inconclusive: k < MIN_FIT_POINTS,
    };
    if k < 2 {
        return fit;
    }
    let mx = used.iter().map(|p| p.0).sum::<f64>() / k as f64;
    let my = used.iter().map(|p| p.1).sum::<f64>() / k as f64;
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = used.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        fit.inconclusive = true;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.correlation = if syy == 0.0 { 0.0 } else { sxy / (sxx * syy).sqrt() };
    fit
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub experiment: String,
    pub config_hash: String,
    /// Every generator and sampler seed used, sorted.
    pub seeds: Vec<u64>,
    pub started: String,
    pub finished: String,
    pub row_count: usize,
    pub planned_runs: usize,
    pub artifact_version: String,
    pub csv: String,
    pub failures: Vec<Failure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_search: Option<FitSummary>,
}

pub fn rows_to_csv(rows: &[Row]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_rows_csv(path: impl AsRef<Path>) -> Result<Vec<Row>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_fit() {
        let pts: Vec<(f64, f64, bool)> = (1..6).map(|i| (i as f64, 3.0 * (i as f64).powi(2), true)).collect();
        let fit = fit_loglog(&pts);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.correlation - 1.0).abs() < 1e-12);
        assert!(!fit.inconclusive);
    }

    #[test]
    fn too_few_points_is_inconclusive() {
        let fit = fit_loglog(&[(1.0, 1.0, true), (2.0, 2.0, true), (3.0, 3.0, false)]);
        assert!(fit.inconclusive);
        assert_eq!(fit.points_used, 2);
    }
}
