//! One module per subcommand. Each writes under
//! `<output_dir>/<dataset>/<command>/` and returns a one-line summary.

pub mod diagnose;
pub mod evaluate;
pub mod explain;
pub mod select_features;
pub mod stats;
pub mod tune;

use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use wsbf_core::data::{build_design_matrix, DesignMatrix, TimeSeriesDataset};
use wsbf_core::evaluation::{hybrid_split, SplitPlan};
use wsbf_core::learners::{Hyperparams, ModelKind};
use wsbf_core::rng;

use crate::config::RunConfig;
use crate::export::read_json;
use crate::ingest::load_csv;

pub const SELECTED_FEATURES_FILE: &str = "selected_features.json";

/// Dataset, design matrix and split shared by the model-based commands.
pub struct Prepared {
    pub raw: TimeSeriesDataset,
    pub imputed: TimeSeriesDataset,
    pub design: DesignMatrix,
    pub split: SplitPlan,
}

impl Prepared {
    /// Design rows before the test window.
    pub fn train(&self) -> DesignMatrix {
        self.design.rows(&self.split.train)
    }
}

pub fn load(cfg: &RunConfig) -> Result<TimeSeriesDataset> {
    load_csv(&cfg.input, &cfg.dataset, cfg.schema.as_deref())
        .with_context(|| format!("loading dataset `{}`", cfg.dataset))
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let raw = load(cfg)?;
    let imputed = raw.impute_same_month_mean()?;
    let design = build_design_matrix(&imputed, &cfg.design_config())?;
    let split = hybrid_split(design.len(), cfg.horizon, cfg.folds)?;
    Ok(Prepared {
        raw,
        imputed,
        design,
        split,
    })
}

/// Master seed split by component name.
pub fn sub_seed(cfg: &RunConfig, component: &str) -> u64 {
    rng::derive_named(cfg.seed, component)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeatures {
    pub features: Vec<String>,
    pub chosen_step: usize,
    pub removed: Vec<String>,
    pub cap: usize,
}

fn selected_path(cfg: &RunConfig) -> PathBuf {
    cfg.command_dir("select-features").join(SELECTED_FEATURES_FILE)
}

/// Features kept by `select-features`, when it has been run.
pub fn selected_features(cfg: &RunConfig) -> Result<Option<Vec<String>>> {
    let p = selected_path(cfg);
    if !p.exists() {
        return Ok(None);
    }
    Ok(Some(read_json::<SelectedFeatures>(&p)?.features))
}

pub fn apply_selection(cfg: &RunConfig, d: &DesignMatrix) -> Result<DesignMatrix> {
    Ok(match selected_features(cfg)? {
        Some(f) => d.select_features(&f)?,
        None => d.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunedModel {
    pub model: ModelKind,
    pub hyperparameters: Hyperparams,
    pub fitness: f64,
    pub optimizer: String,
    pub seed: u64,
    pub eval_id: u64,
    pub fold_maes: Vec<f64>,
    pub features: Vec<String>,
}

pub fn tuned_path(cfg: &RunConfig, kind: ModelKind) -> PathBuf {
    cfg.command_dir("tune").join(format!("best_{kind}.json"))
}

/// Tuned hyperparameters if `tune` has produced them, else the configured
/// defaults. The flag reports which.
pub fn hyperparams_for(cfg: &RunConfig, kind: ModelKind) -> Result<(Hyperparams, bool)> {
    let p = tuned_path(cfg, kind);
    if p.exists() {
        let t: TunedModel = read_json(&p)?;
        return Ok((t.hyperparameters, true));
    }
    Ok((cfg.hyperparams(kind), false))
}
