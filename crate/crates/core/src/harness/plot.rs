use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::output::{fit_loglog, write_text, Row};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// `delta epsilon fit` from linear-dependence rows.
    DeltaEpsilon,
    /// `n deviation property` from suite rows.
    DeviationVsN,
    /// `d gap target` from amplification rows.
    GapVsD,
}

impl PlotKind {
    pub fn file_stem(self) -> &'static str {
        match self {
            PlotKind::DeltaEpsilon => "delta_epsilon",
            PlotKind::DeviationVsN => "deviation_vs_n",
            PlotKind::GapVsD => "gap_vs_d",
        }
    }
}

fn finite(row: &Row, index: usize, value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::input(format!(
            "row {index} (point {}, replicate {}, metric {}) has non-finite {what}: {value}",
            row.point, row.replicate, row.metric
        )))
    }
}

/// Renders whitespace-separated columns under a `#` header naming the axes.
pub fn plot_data(rows: &[Row], kind: PlotKind) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::input("no rows to plot"));
    }
    let mut out = String::new();
    match kind {
        PlotKind::DeltaEpsilon => {
            let mut pairs: BTreeMap<(usize, usize), (Option<f64>, Option<f64>, bool)> = BTreeMap::new();
            for (i, row) in rows.iter().enumerate() {
                let slot = pairs.entry((row.point, row.replicate)).or_insert((None, None, false));
                match row.metric.as_str() {
                    "delta" => {
                        slot.0 = Some(finite(row, i, row.measured, "delta")?);
                        slot.2 = row.holds.unwrap_or(true);
                    }
                    "epsilon" => slot.1 = Some(finite(row, i, row.measured, "epsilon")?),
                    _ => {}
                }
            }
            let points: Vec<(f64, f64, bool)> = pairs
                .values()
                .filter_map(|&(d, e, above)| Some((d?, e?, above)))
                .collect();
            if points.is_empty() {
                return Err(Error::input("no delta/epsilon pairs among the rows"));
            }
            let fit = fit_loglog(&points);
            let _ = writeln!(out, "# x: delta (labelled deviation)  y: epsilon (edge discrepancy)");
            let _ = writeln!(
                out,
                "# fit: log epsilon = {} * log delta + {}  (r = {}, {} of {} points above floor)",
                fit.slope, fit.intercept, fit.correlation, fit.points_used, fit.points_total
            );
            let _ = writeln!(out, "# delta epsilon fit above_floor");
            for (d, e, above) in points {
                let line = if fit.slope.is_finite() {
                    (fit.intercept + fit.slope * d.ln()).exp()
                } else {
                    f64::NAN
                };
                let _ = writeln!(out, "{d:e} {e:e} {line:e} {}", above as u8);
            }
        }
        PlotKind::DeviationVsN => {
            let _ = writeln!(out, "# x: n  y: normalised deviation");
            let _ = writeln!(out, "# n deviation property");
            for (i, row) in rows.iter().enumerate() {
                let value = finite(row, i, row.measured, "measured")?;
                let _ = writeln!(out, "{} {value:e} {}", row.n, row.metric);
            }
        }
        PlotKind::GapVsD => {
            let _ = writeln!(out, "# x: D (input discrepancy)  y: achieved gap |e(X) - e(Y)|");
            let _ = writeln!(out, "# d gap target");
            let mut any = false;
            for (i, row) in rows.iter().enumerate().filter(|(_, r)| r.metric == "amplification_gap") {
                let gap = finite(row, i, row.measured, "gap")?;
                let target = finite(row, i, row.reference.unwrap_or(f64::NAN), "target")?;
                let cert: serde_json::Value = serde_json::from_str(&row.detail)
                    .map_err(|e| Error::input(format!("row {i} has no certificate: {e}")))?;
                let d = finite(row, i, cert["d"].as_f64().unwrap_or(f64::NAN), "d")?;
                let _ = writeln!(out, "{d:e} {gap:e} {target:e}");
                any = true;
            }
            if !any {
                return Err(Error::input("no amplification rows to plot"));
            }
        }
    }
    Ok(out)
}

/// Writes [`plot_data`] to `<dir>/<prefix>_<kind>.dat`.
pub fn emit_plot_data(rows: &[Row], kind: PlotKind, dir: &Path, prefix: &str) -> Result<PathBuf> {
    let text = plot_data(rows, kind)?;
    write_text(&dir.join(format!("{prefix}_{}.dat", kind.file_stem())), &text)
}
