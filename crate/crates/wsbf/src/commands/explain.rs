use anyhow::Result;
use serde::Serialize;
use wsbf_core::learners::fit;
use wsbf_core::shapley::{
    default_method, explain, force_plot_data, mean_abs_importance, subsample_background, ForcePlot, Importance,
    ShapleyMethod,
};

use super::{apply_selection, hyperparams_for, prepare, sub_seed};
use crate::config::{RunConfig, ShapMethodSetting};
use crate::export::{ensure_dir, num, opt, write_json, Table};

#[derive(Serialize)]
struct ModelReport {
    model: String,
    tuned: bool,
    method: ShapleyMethod,
    base_value: f64,
    /// Largest `|base + sum(phi) - prediction|` over the instances.
    max_additivity_gap: f64,
    force_plot: ForcePlot,
}

#[derive(Serialize)]
struct Report {
    dataset: String,
    instances: usize,
    background_rows: usize,
    features: Vec<String>,
    models: Vec<ModelReport>,
    importance: Vec<Importance>,
}

pub fn run(cfg: &RunConfig) -> Result<String> {
    let prep = prepare(cfg)?;
    let train = apply_selection(cfg, &prep.train())?;
    let m = train.feature_names().len();
    let background = subsample_background(train.x(), cfg.shap.background_cap, sub_seed(cfg, "explain-background"));
    let perm_seed = sub_seed(cfg, "explain-permutations");
    let method = match cfg.shap.method {
        ShapMethodSetting::Auto => default_method(m, cfg.shap.auto_exact_limit, cfg.shap.permutations, perm_seed),
        ShapMethodSetting::Exact => ShapleyMethod::Exact,
        ShapMethodSetting::Sampled => ShapleyMethod::Sampled {
            permutations: cfg.shap.permutations,
            seed: perm_seed,
        },
    };
    let fit_seed = sub_seed(cfg, "explain-fit");
    let dir = ensure_dir(&cfg.command_dir("explain"))?;
    let mut shap = Table::new(&["model", "period", "feature", "value", "phi", "std_err"]);
    let mut force = Table::new(&["model", "feature", "mean_phi", "mean_value"]);
    let mut reports = Vec::new();
    let mut models = Vec::new();
    for &kind in &cfg.shap.explain_models {
        let (hp, tuned) = hyperparams_for(cfg, kind)?;
        let model = fit(kind, &train.features, &train.target, &hp, fit_seed)?;
        let rep = explain(&model, train.x(), &background, method)?;
        for (i, row) in rep.phi.iter().enumerate() {
            for (j, phi) in row.iter().enumerate() {
                shap.push(vec![
                    kind.to_string(),
                    train.periods[i].to_string(),
                    rep.feature_names[j].clone(),
                    num(rep.instances.row(i)[j]),
                    num(*phi),
                    opt(rep.std_err.as_ref().map(|s| s[i][j])),
                ]);
            }
        }
        let fp = force_plot_data(&rep);
        for c in &fp.contributions {
            force.push(vec![kind.to_string(), c.feature.clone(), num(c.mean_phi), num(c.mean_value)]);
        }
        let gap = rep
            .phi
            .iter()
            .zip(&rep.predictions)
            .map(|(p, y)| (rep.base_value + p.iter().sum::<f64>() - y).abs())
            .fold(0.0, f64::max);
        models.push(ModelReport {
            model: kind.to_string(),
            tuned,
            method,
            base_value: rep.base_value,
            max_additivity_gap: gap,
            force_plot: fp,
        });
        reports.push(rep);
    }
    shap.write(&dir.join("shap.csv"))?;
    force.write(&dir.join("force_plot.csv"))?;
    let importance = mean_abs_importance(&reports)?;
    let mut imp = Table::new(&["rank", "feature", "mean_abs_shap"]);
    for (i, r) in importance.iter().enumerate() {
        imp.push(vec![(i + 1).to_string(), r.feature.clone(), num(r.importance)]);
    }
    imp.write(&dir.join("importance.csv"))?;
    let top: Vec<String> = importance.iter().take(3).map(|r| r.feature.clone()).collect();
    write_json(
        &dir.join("explain.json"),
        &Report {
            dataset: cfg.dataset.clone(),
            instances: train.len(),
            background_rows: background.rows(),
            features: train.feature_names().to_vec(),
            models,
            importance,
        },
    )?;
    Ok(format!(
        "{}: {} attributions over {m} features, top: {}",
        cfg.dataset,
        method.tag(),
        top.join(", ")
    ))
}
