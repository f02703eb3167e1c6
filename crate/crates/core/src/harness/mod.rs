//! Configuration-driven experiments with reproducible CSV output.
//!
//! A run writes `<tag>.csv` (rows in plan order, no timestamps), a
//! `<tag>_manifest.json` with the config hash, seeds and timing, and plot-ready
//! `.dat` files where the experiment has a natural figure.

mod config;
mod experiments;
mod output;
mod plot;

use std::collections::BTreeSet;
use std::path::PathBuf;

use rayon::prelude::*;

pub use config::{
    load_config, ExperimentConfig, ExperimentKind, PatternSpec, RunPoint, Sweep, SweepParameter, MIN_LINEAR_SWEEP,
};
pub use experiments::{BOUND_RATIO_CEILING, NOISE_FLOOR_SIGMAS};
pub use output::{fit_loglog, read_rows_csv, rows_to_csv, ExperimentManifest, Failure, FitSummary, Row, MIN_FIT_POINTS};
pub use plot::{emit_plot_data, plot_data, PlotKind};

use crate::error::{Error, Result};
use experiments::Context;
use output::write_text;

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<Row>,
    pub manifest: ExperimentManifest,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub plot_paths: Vec<PathBuf>,
}

impl ExperimentOutput {
    pub fn has_failures(&self) -> bool {
        !self.manifest.failures.is_empty()
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Evaluates every planned run without touching the filesystem. Failed runs
/// become a single `error` row and a [`Failure`].
pub fn evaluate(config: &ExperimentConfig) -> Result<(Vec<Row>, Vec<Failure>)> {
    config.validate()?;
    let ctx = Context {
        config,
        pattern: config.pattern.resolve()?,
        label: config.pattern.label(),
    };
    let plan = config.plan();
    let work = || -> Vec<std::result::Result<Vec<Row>, (Row, Failure)>> {
        plan.par_iter()
            .map(|run| {
                ctx.evaluate(run).map_err(|e| {
                    let message = e.to_string();
                    (
                        ctx.error_row(run, &message),
                        Failure {
                            point: run.point,
                            replicate: run.replicate,
                            message,
                        },
                    )
                })
            })
            .collect()
    };
    let results = if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Config(format!("workers: {e}")))?
            .install(work)
    } else {
        work()
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for result in results {
        match result {
            Ok(mut r) => rows.append(&mut r),
            Err((row, failure)) => {
                rows.push(row);
                failures.push(failure);
            }
        }
    }
    Ok((rows, failures))
}

fn delta_epsilon_fit(rows: &[Row], epsilon_metric: &str) -> FitSummary {
    let mut points = Vec::new();
    for delta in rows.iter().filter(|r| r.metric == "delta") {
        if let Some(eps) = rows
            .iter()
            .find(|r| r.metric == epsilon_metric && r.point == delta.point && r.replicate == delta.replicate)
        {
            points.push((delta.measured, eps.measured, delta.holds.unwrap_or(false)));
        }
    }
    fit_loglog(&points)
}

/// Runs the configured experiment and writes its CSV, manifest and plot data
/// under `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let started = now();
    let (rows, failures) = evaluate(config)?;
    let tag = config.experiment.tag();
    let dir = &config.output_dir;

    let csv_path = write_text(&dir.join(format!("{tag}.csv")), &rows_to_csv(&rows)?)?;
    let ok_rows: Vec<Row> = rows.iter().filter(|r| r.metric != "error").cloned().collect();
    let plot_kind = match config.experiment {
        ExperimentKind::CgwSuite => Some(PlotKind::DeviationVsN),
        ExperimentKind::LinearDependence => Some(PlotKind::DeltaEpsilon),
        ExperimentKind::Amplification => Some(PlotKind::GapVsD),
        ExperimentKind::CountingLemma | ExperimentKind::MainLemma => None,
    };
    let mut plot_paths = Vec::new();
    if let Some(kind) = plot_kind {
        if !ok_rows.is_empty() {
            plot_paths.push(emit_plot_data(&ok_rows, kind, dir, tag)?);
        }
    }
    let (fit, fit_search) = if config.experiment == ExperimentKind::LinearDependence {
        (
            Some(delta_epsilon_fit(&ok_rows, "epsilon")),
            Some(delta_epsilon_fit(&ok_rows, "epsilon_search")),
        )
    } else {
        (None, None)
    };

    let plan = config.plan();
    let seeds: BTreeSet<u64> = plan
        .iter()
        .flat_map(|r| [r.generator.seed, r.sampler.seed])
        .collect();
    let manifest = ExperimentManifest {
        experiment: tag.into(),
        config_hash: config.config_hash(),
        seeds: seeds.into_iter().collect(),
        started,
        finished: now(),
        row_count: rows.len(),
        planned_runs: plan.len(),
        artifact_version: env!("CARGO_PKG_VERSION").into(),
        csv: csv_path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        failures,
        fit,
        fit_search,
    };
    let manifest_path = write_text(
        &dir.join(format!("{tag}_manifest.json")),
        &serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(ExperimentOutput {
        rows,
        manifest,
        csv_path,
        manifest_path,
        plot_paths,
    })
}

fn expect_kind(config: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if config.experiment != kind {
        return Err(Error::Config(format!(
            "experiment: expected {}, config says {}",
            kind.tag(),
            config.experiment.tag()
        )));
    }
    Ok(())
}

pub fn run_cgw_suite(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    expect_kind(config, ExperimentKind::CgwSuite)?;
    run_experiment(config)
}

pub fn run_linear_dependence(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    expect_kind(config, ExperimentKind::LinearDependence)?;
    run_experiment(config)
}

pub fn run_counting_lemma(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    expect_kind(config, ExperimentKind::CountingLemma)?;
    run_experiment(config)
}

pub fn run_amplification(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    expect_kind(config, ExperimentKind::Amplification)?;
    run_experiment(config)
}

pub fn run_main_lemma(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    expect_kind(config, ExperimentKind::MainLemma)?;
    run_experiment(config)
}
