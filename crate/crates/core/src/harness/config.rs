use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::generate::{GeneratorKind, GeneratorSpec};
use crate::pattern::Pattern;
use crate::sampler::SamplerSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CgwSuite,
    LinearDependence,
    CountingLemma,
    Amplification,
    MainLemma,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::CgwSuite,
        ExperimentKind::LinearDependence,
        ExperimentKind::CountingLemma,
        ExperimentKind::Amplification,
        ExperimentKind::MainLemma,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::CgwSuite => "cgw_suite",
            ExperimentKind::LinearDependence => "linear_dependence",
            ExperimentKind::CountingLemma => "counting_lemma",
            ExperimentKind::Amplification => "amplification",
            ExperimentKind::MainLemma => "main_lemma",
        }
    }
}

/// A named preset (`K3`, `C4`, `P3`, ..) or an explicit pattern table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatternSpec {
    Preset(String),
    Explicit(Pattern),
}

impl PatternSpec {
    pub fn resolve(&self) -> Result<Pattern> {
        match self {
            PatternSpec::Preset(name) => Pattern::from_name(name),
            PatternSpec::Explicit(p) => Ok(p.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PatternSpec::Preset(name) => name.to_ascii_uppercase(),
            PatternSpec::Explicit(p) => format!("custom(r={},e={})", p.r(), p.edge_count()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    PlantBoost,
    PlantFraction,
    P,
    N,
    PRef,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::PlantBoost => "plant_boost",
            SweepParameter::PlantFraction => "plant_fraction",
            SweepParameter::P => "p",
            SweepParameter::N => "n",
            SweepParameter::PRef => "p_ref",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub generator: GeneratorSpec,
    pub pattern: PatternSpec,
    pub p_ref: f64,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Independent instances per sweep point; replicate `k` offsets the
    /// generator and sampler seeds by `k`.
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Concurrent sweep points; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    /// The `o(n²)` slack of the amplification certificate.
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Window for the raw amplification set sizes, as a fraction of `n`.
    #[serde(default = "default_size_slack")]
    pub size_slack: f64,
    #[serde(default = "default_max_retries")]
    pub max_retries: usize,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_replicates() -> usize {
    1
}

fn default_slack() -> f64 {
    0.02
}

fn default_size_slack() -> f64 {
    0.05
}

fn default_max_retries() -> usize {
    10
}

/// Smallest sweep accepted by the linear-dependence fit.
pub const MIN_LINEAR_SWEEP: usize = 5;

/// One `(sweep point, replicate)` pair with its fully resolved generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunPoint {
    pub point: usize,
    pub replicate: usize,
    pub sweep_value: Option<f64>,
    pub generator: GeneratorSpec,
    pub p_ref: f64,
    pub sampler: SamplerSpec,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, generator: GeneratorSpec, pattern: &str, p_ref: f64) -> Self {
        ExperimentConfig {
            experiment,
            generator,
            pattern: PatternSpec::Preset(pattern.into()),
            p_ref,
            sampler: SamplerSpec::default(),
            sweep: None,
            output_dir: default_output_dir(),
            replicates: default_replicates(),
            workers: 0,
            slack: default_slack(),
            size_slack: default_size_slack(),
            max_retries: default_max_retries(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, e: Error| Error::Config(format!("{name}: {e}"));
        if !(0.0..=1.0).contains(&self.p_ref) {
            return Err(Error::Config(format!("p_ref: {} is outside [0, 1]", self.p_ref)));
        }
        self.generator.validate().map_err(|e| field("generator", e))?;
        self.sampler.validate().map_err(|e| field("sampler", e))?;
        let pattern = self.pattern.resolve().map_err(|e| field("pattern", e))?;
        if !pattern.is_nonempty() {
            return Err(Error::Config("pattern: needs at least one edge".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates: must be at least 1".into()));
        }
        if !(self.slack >= 0.0) || !(self.size_slack >= 0.0) {
            return Err(Error::Config("slack, size_slack: must be non-negative".into()));
        }
        if let Some(path) = &self.generator.path {
            if self.generator.kind == GeneratorKind::File && !path.is_file() {
                return Err(Error::Config(format!("generator.path: {} does not exist", path.display())));
            }
        }
        if let Some(sweep) = &self.sweep {
            if self.generator.kind == GeneratorKind::File && sweep.parameter != SweepParameter::PRef {
                return Err(Error::Config(format!(
                    "sweep.parameter: {} cannot vary a graph read from a file",
                    sweep.parameter.name()
                )));
            }
            for point in self.plan() {
                point
                    .generator
                    .validate()
                    .map_err(|e| field(&format!("sweep.values[{}]", point.point), e))?;
                if !(0.0..=1.0).contains(&point.p_ref) {
                    return Err(Error::Config(format!("sweep.values[{}]: p_ref outside [0, 1]", point.point)));
                }
            }
            if let Some(bad) = sweep.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Config(format!("sweep.values[{bad}]: not a finite number")));
            }
            if sweep.parameter == SweepParameter::N && sweep.values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
                return Err(Error::Config("sweep.values: n must be a non-negative integer".into()));
            }
        }
        if self.experiment == ExperimentKind::LinearDependence {
            let points = self.sweep.as_ref().map_or(0, |s| s.values.len());
            if points < MIN_LINEAR_SWEEP {
                return Err(Error::Config(format!(
                    "sweep: linear_dependence needs at least {MIN_LINEAR_SWEEP} sweep values, got {points}"
                )));
            }
            if self.generator.kind != GeneratorKind::PlantedDense {
                return Err(Error::Config("generator.kind: linear_dependence needs planted_dense".into()));
            }
        }
        Ok(())
    }

    /// Every run in deterministic order: sweep points outermost, replicates inner.
    pub fn plan(&self) -> Vec<RunPoint> {
        let values: Vec<Option<f64>> = match &self.sweep {
            Some(s) if !s.values.is_empty() => s.values.iter().copied().map(Some).collect(),
            _ => vec![None],
        };
        let mut runs = Vec::new();
        for (point, value) in values.into_iter().enumerate() {
            for replicate in 0..self.replicates {
                let mut generator = self.generator.clone();
                let mut p_ref = self.p_ref;
                if let (Some(v), Some(sweep)) = (value, &self.sweep) {
                    match sweep.parameter {
                        SweepParameter::PlantBoost => generator.plant_boost = v,
                        SweepParameter::PlantFraction => generator.plant_fraction = v,
                        SweepParameter::P => generator.p = v,
                        SweepParameter::N => generator.n = v as usize,
                        SweepParameter::PRef => p_ref = v,
                    }
                }
                generator.seed = generator.seed.wrapping_add(replicate as u64);
                let sampler = SamplerSpec {
                    seed: self.sampler.seed.wrapping_add(replicate as u64),
                    ..self.sampler
                };
                runs.push(RunPoint {
                    point,
                    replicate,
                    sweep_value: value,
                    generator,
                    p_ref,
                    sampler,
                });
            }
        }
        runs
    }

    /// SHA-256 of the canonical JSON form, ignoring fields that do not change
    /// results (`output_dir`, `workers`). Object keys are sorted, so the hash
    /// does not depend on key order in the source file.
    pub fn config_hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output_dir");
            map.remove("workers");
        }
        let canonical = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// The effective configuration, defaults included, followed by the plan.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# effective configuration ({})", self.experiment.tag());
        out.push_str(&self.to_toml_string());
        let plan = self.plan();
        let _ = writeln!(out, "# planned runs: {}", plan.len());
        for run in &plan {
            let value = match (run.sweep_value, &self.sweep) {
                (Some(v), Some(s)) => format!(" {}={v}", s.parameter.name()),
                _ => String::new(),
            };
            let _ = writeln!(
                out,
                "#   run {}.{}{value} seed={} sampler_seed={}",
                run.point, run.replicate, run.generator.seed, run.sampler.seed
            );
        }
        out
    }
}

/// Reads and validates a TOML experiment config. Relative paths inside the
/// file resolve against the file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config: ExperimentConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    if let Some(graph) = &config.generator.path {
        if graph.is_relative() {
            config.generator.path = Some(base.join(graph));
        }
    }
    if config.output_dir.is_relative() {
        config.output_dir = base.join(&config.output_dir);
    }
    config.validate()?;
    Ok(config)
}
