//! JSON run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wsbf_core::data::{DesignConfig, Period};
use wsbf_core::learners::{default_hyperparams, Hyperparams, ModelKind};
use wsbf_core::metaheuristics::{GaConfig, Optimizer, PsoConfig};
use wsbf_core::wsb::DEFAULT_GLOBAL_WEIGHT;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Ga,
    Pso,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuningConfig {
    pub optimizers: Vec<OptimizerKind>,
    pub seeds: Vec<u64>,
    pub population: usize,
    pub iterations: usize,
    pub mutation_rate: f64,
    pub tournament: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub velocity_scale: f64,
    /// Evaluate each wave of candidates on all cores.
    pub parallel: bool,
}

impl Default for TuningConfig {
    fn default() -> Self {
        let ga = GaConfig::default();
        let pso = PsoConfig::default();
        Self {
            optimizers: vec![OptimizerKind::Ga, OptimizerKind::Pso],
            seeds: vec![1, 2, 3],
            population: ga.population,
            iterations: ga.iterations,
            mutation_rate: ga.mutation_rate,
            tournament: ga.tournament,
            inertia: pso.inertia,
            cognitive: pso.cognitive,
            social: pso.social,
            velocity_scale: pso.velocity_scale,
            parallel: true,
        }
    }
}

impl TuningConfig {
    pub fn optimizer(&self, kind: OptimizerKind) -> Optimizer {
        match kind {
            OptimizerKind::Ga => Optimizer::Ga(GaConfig {
                population: self.population,
                iterations: self.iterations,
                mutation_rate: self.mutation_rate,
                tournament: self.tournament,
            }),
            OptimizerKind::Pso => Optimizer::Pso(PsoConfig {
                particles: self.population,
                iterations: self.iterations,
                inertia: self.inertia,
                cognitive: self.cognitive,
                social: self.social,
                velocity_scale: self.velocity_scale,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightTuningSlice {
    /// Trailing training rows, never the test window.
    Validation,
    /// The test window itself; only for comparison with published runs.
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WsbSettings {
    pub w: f64,
    pub tune: bool,
    pub samples: usize,
    pub tune_on: WeightTuningSlice,
}

impl Default for WsbSettings {
    fn default() -> Self {
        Self {
            w: DEFAULT_GLOBAL_WEIGHT,
            tune: true,
            samples: 200,
            tune_on: WeightTuningSlice::Validation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapMethodSetting {
    /// Exact enumeration up to [`ShapSettings::auto_exact_limit`] features,
    /// sampled above.
    Auto,
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShapSettings {
    pub method: ShapMethodSetting,
    pub auto_exact_limit: usize,
    pub permutations: usize,
    pub background_cap: usize,
    pub elimination_cap: usize,
    pub validation_rows: usize,
    pub explain_models: Vec<ModelKind>,
}

impl Default for ShapSettings {
    fn default() -> Self {
        Self {
            method: ShapMethodSetting::Auto,
            auto_exact_limit: 12,
            permutations: 10,
            background_cap: 100,
            elimination_cap: 40,
            validation_rows: 12,
            explain_models: vec![ModelKind::Rf, ModelKind::Gbt],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSettings {
    pub max_lag: usize,
    pub period: usize,
}

impl Default for DiagnosticsSettings {
    fn default() -> Self {
        Self { max_lag: 24, period: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// CSV path; relative paths resolve against the config file's folder.
    pub input: PathBuf,
    pub dataset: String,
    /// Expected exogenous columns; any set is accepted when absent.
    #[serde(default)]
    pub schema: Option<Vec<String>>,
    #[serde(default = "default_lags")]
    pub lags: Vec<usize>,
    #[serde(default = "default_covid_start")]
    pub covid_start: Period,
    #[serde(default = "default_covid_end")]
    pub covid_end: Period,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_strong")]
    pub strong_model: ModelKind,
    #[serde(default = "default_weak")]
    pub weak_models: Vec<ModelKind>,
    /// Per-model overrides merged over the built-in defaults.
    #[serde(default)]
    pub hyperparameters: BTreeMap<ModelKind, Hyperparams>,
    #[serde(default)]
    pub tuning: TuningConfig,
    #[serde(default)]
    pub wsb: WsbSettings,
    #[serde(default)]
    pub shap: ShapSettings,
    #[serde(default)]
    pub diagnostics: DiagnosticsSettings,
}

fn default_lags() -> Vec<usize> {
    DesignConfig::default().lags
}
fn default_covid_start() -> Period {
    DesignConfig::default().covid_start
}
fn default_covid_end() -> Period {
    DesignConfig::default().covid_end
}
fn default_horizon() -> usize {
    12
}
fn default_folds() -> usize {
    5
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_strong() -> ModelKind {
    ModelKind::Lstm
}
fn default_weak() -> Vec<ModelKind> {
    vec![ModelKind::Rf, ModelKind::Svr, ModelKind::Gbt]
}

impl RunConfig {
    pub fn from_json(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig = serde_json::from_str(text)?;
        if cfg.input.is_relative() {
            cfg.input = base.join(&cfg.input);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dataset.is_empty()
            || !self
                .dataset
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(field("dataset", "use letters, digits, `_` or `-`"));
        }
        if self.horizon == 0 {
            return Err(field("horizon", "must be at least 1"));
        }
        if self.folds == 0 {
            return Err(field("folds", "must be at least 1"));
        }
        if self.lags.contains(&0) {
            return Err(field("lags", "lags must be positive"));
        }
        if self.covid_start > self.covid_end {
            return Err(field("covid_start", "starts after covid_end"));
        }
        if self.strong_model.is_smoothing() {
            return Err(field("strong_model", "must be a feature-based learner"));
        }
        if self.weak_models.is_empty() {
            return Err(field("weak_models", "at least one weak model is required"));
        }
        if self.weak_models.iter().any(|m| m.is_smoothing() || *m == self.strong_model) {
            return Err(field("weak_models", "must be feature-based learners other than the strong model"));
        }
        let t = &self.tuning;
        if t.population == 0 || t.iterations == 0 || t.tournament == 0 {
            return Err(field("tuning", "population, iterations and tournament must be positive"));
        }
        if t.seeds.is_empty() {
            return Err(field("tuning.seeds", "at least one seed is required"));
        }
        if t.optimizers.is_empty() {
            return Err(field("tuning.optimizers", "at least one optimizer is required"));
        }
        if !(0.0..=1.0).contains(&t.mutation_rate) {
            return Err(field("tuning.mutation_rate", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.wsb.w) {
            return Err(field("wsb.w", "must lie in [0, 1]"));
        }
        if self.wsb.tune && self.wsb.samples == 0 {
            return Err(field("wsb.samples", "must be positive when tuning"));
        }
        let s = &self.shap;
        if s.permutations == 0 || s.background_cap == 0 || s.validation_rows == 0 {
            return Err(field("shap", "permutations, background_cap and validation_rows must be positive"));
        }
        if s.explain_models.iter().any(|m| m.is_smoothing()) {
            return Err(field("shap.explain_models", "smoothing models have no features to explain"));
        }
        if self.diagnostics.period < 2 {
            return Err(field("diagnostics.period", "must be at least 2"));
        }
        for (kind, hp) in &self.hyperparameters {
            let merged = default_hyperparams(*kind).merged(hp);
            wsbf_core::learners::search_space(*kind)
                .check(&merged)
                .map_err(|e| field(&format!("hyperparameters.{kind}"), e.to_string()))?;
        }
        Ok(())
    }

    pub fn design_config(&self) -> DesignConfig {
        DesignConfig {
            lags: self.lags.clone(),
            covid_start: self.covid_start,
            covid_end: self.covid_end,
        }
    }

    /// Built-in defaults with the configured overrides on top.
    pub fn hyperparams(&self, kind: ModelKind) -> Hyperparams {
        match self.hyperparameters.get(&kind) {
            Some(o) => default_hyperparams(kind).merged(o),
            None => default_hyperparams(kind),
        }
    }

    pub fn command_dir(&self, command: &str) -> PathBuf {
        self.output_dir.join(&self.dataset).join(command)
    }
}
