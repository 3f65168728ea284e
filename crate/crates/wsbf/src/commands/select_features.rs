use anyhow::{bail, Result};
use serde::Serialize;
use wsbf_core::learners::ModelKind;
use wsbf_core::shapley::{backward_elimination, EliminationConfig, EliminationStep, Importance};

use super::{hyperparams_for, prepare, sub_seed, SelectedFeatures, SELECTED_FEATURES_FILE};
use crate::config::RunConfig;
use crate::export::{ensure_dir, num, write_json, Table};

#[derive(Serialize)]
struct Report<'a> {
    dataset: &'a str,
    requested_cap: usize,
    cap: usize,
    initial_features: usize,
    chosen_step: usize,
    steps: &'a [EliminationStep],
    ranking: &'a [Importance],
}

pub fn run(cfg: &RunConfig) -> Result<String> {
    let prep = prepare(cfg)?;
    let train = prep.train();
    let m = train.feature_names().len();
    if m < 2 {
        bail!("feature elimination needs at least two features, found {m}");
    }
    // Removing every feature leaves nothing to fit, so the cap stops one short.
    let cap = cfg.shap.elimination_cap.min(m - 1);
    let (rf_hp, _) = hyperparams_for(cfg, ModelKind::Rf)?;
    let (gbt_hp, _) = hyperparams_for(cfg, ModelKind::Gbt)?;
    let ec = EliminationConfig {
        cap,
        validation_rows: cfg.shap.validation_rows,
        background_cap: cfg.shap.background_cap,
        exact_limit: cfg.shap.auto_exact_limit,
        permutations: cfg.shap.permutations,
        seed: sub_seed(cfg, "select-features"),
    };
    let tr = backward_elimination(&train, &rf_hp, &gbt_hp, &ec)?;

    let dir = ensure_dir(&cfg.command_dir("select-features"))?;
    let mut steps = Table::new(&["step", "removed", "remaining", "mae_rf", "mae_gbt", "mae_avg"]);
    for s in &tr.steps {
        steps.push(vec![
            s.step.to_string(),
            s.removed.clone().unwrap_or_default(),
            s.remaining.to_string(),
            num(s.mae_rf),
            num(s.mae_gbt),
            num(s.mae_avg),
        ]);
    }
    steps.write(&dir.join("elimination.csv"))?;
    let mut ranking = Table::new(&["rank", "feature", "mean_abs_shap"]);
    for (i, r) in tr.ranking.iter().enumerate() {
        ranking.push(vec![(i + 1).to_string(), r.feature.clone(), num(r.importance)]);
    }
    ranking.write(&dir.join("ranking.csv"))?;
    let mut shap = Table::new(&["model", "period", "feature", "value", "phi"]);
    for (model, rep) in ["rf", "gbt"].iter().zip(&tr.reports) {
        for (i, row) in rep.phi.iter().enumerate() {
            for (j, phi) in row.iter().enumerate() {
                shap.push(vec![
                    model.to_string(),
                    train.periods[i].to_string(),
                    rep.feature_names[j].clone(),
                    num(rep.instances.row(i)[j]),
                    num(*phi),
                ]);
            }
        }
    }
    shap.write(&dir.join("shap.csv"))?;
    let removed: Vec<String> = tr.steps[1..=tr.chosen].iter().filter_map(|s| s.removed.clone()).collect();
    write_json(
        &dir.join(SELECTED_FEATURES_FILE),
        &SelectedFeatures {
            features: tr.final_features.clone(),
            chosen_step: tr.chosen,
            removed,
            cap,
        },
    )?;
    write_json(
        &dir.join("elimination.json"),
        &Report {
            dataset: &cfg.dataset,
            requested_cap: cfg.shap.elimination_cap,
            cap,
            initial_features: m,
            chosen_step: tr.chosen,
            steps: &tr.steps,
            ranking: &tr.ranking,
        },
    )?;
    let best = &tr.steps[tr.chosen];
    Ok(format!(
        "{}: kept {} of {m} features after removing {} (validation MAE {:.2} kWh, cap {cap})",
        cfg.dataset,
        tr.final_features.len(),
        tr.chosen,
        best.mae_avg
    ))
}
