use anyhow::{bail, Result};
use serde::Serialize;
use wsbf_core::evaluation::{fold_stats, FoldStats};
use wsbf_core::learners::{search_space, ModelKind};
use wsbf_core::metaheuristics::{cv_fold_maes, multi_seed_campaign, CampaignResult, CvObjective, Serial, WaveEvaluator};

use super::{apply_selection, prepare, sub_seed, tuned_path, TunedModel};
use crate::config::RunConfig;
use crate::export::{ensure_dir, num, trace_table, write_json, Table};
use crate::parallel::Rayon;

#[derive(Serialize)]
struct CampaignSummary {
    optimizer: String,
    best_fitness: f64,
    best_seed: u64,
    mean_best_so_far: Vec<f64>,
    evaluations: usize,
}

#[derive(Serialize)]
struct Report<'a> {
    model: ModelKind,
    best: &'a TunedModel,
    fold_stats: FoldStats,
    campaigns: Vec<CampaignSummary>,
}

pub fn run(cfg: &RunConfig, kind: ModelKind) -> Result<String> {
    if kind.is_smoothing() {
        bail!("`{kind}` has no hyperparameters to tune");
    }
    let prep = prepare(cfg)?;
    let train = apply_selection(cfg, &prep.train())?;
    let cv_seed = sub_seed(cfg, "tune-cv");
    let objective = CvObjective {
        kind,
        design: &train,
        k: cfg.folds,
        seed: cv_seed,
    };
    let space = search_space(kind);
    let evaluator: &dyn WaveEvaluator = if cfg.tuning.parallel { &Rayon } else { &Serial };

    let campaigns: Vec<(String, CampaignResult)> = cfg
        .tuning
        .optimizers
        .iter()
        .map(|&o| {
            let opt = cfg.tuning.optimizer(o);
            let res = multi_seed_campaign(&opt, &objective, &space, &cfg.tuning.seeds, evaluator);
            (opt.tag().to_string(), res)
        })
        .collect();

    // Earlier optimizers in the config win ties.
    let (winner_tag, winner) = campaigns
        .iter()
        .map(|(t, c)| (t, c.best()))
        .reduce(|a, b| {
            let fa = a.1.best.fitness.unwrap_or(f64::INFINITY);
            let fb = b.1.best.fitness.unwrap_or(f64::INFINITY);
            if fb < fa { b } else { a }
        })
        .expect("at least one optimizer");
    let fitness = winner.best.fitness.unwrap_or(f64::INFINITY);
    if !fitness.is_finite() {
        bail!("every {kind} candidate failed cross-validation");
    }
    let fold_maes = cv_fold_maes(kind, &train, &winner.best.hyperparams, cfg.folds, cv_seed, winner.best.eval_id)?;
    let best = TunedModel {
        model: kind,
        hyperparameters: winner.best.hyperparams.clone(),
        fitness,
        optimizer: winner_tag.clone(),
        seed: winner.trace.seed,
        eval_id: winner.best.eval_id,
        fold_maes: fold_maes.clone(),
        features: train.feature_names().to_vec(),
    };

    let tune_dir = cfg.command_dir("tune");
    let dir = ensure_dir(&tune_dir.join(kind.token()))?;
    let traces: Vec<_> = campaigns.iter().flat_map(|(_, c)| c.traces()).collect();
    trace_table(&traces).write(&dir.join("trace.csv"))?;
    let mut mean = Table::new(&["iteration", "optimizer", "mean_best_so_far"]);
    let mut evals = Table::new(&["optimizer", "seed", "eval_id", "iteration", "fitness", "hyperparameters"]);
    for (tag, c) in &campaigns {
        for (i, v) in c.mean_best_so_far.iter().enumerate() {
            mean.push(vec![(i + 1).to_string(), tag.clone(), num(*v)]);
        }
        for run in &c.runs {
            for e in &run.log {
                evals.push(vec![
                    tag.clone(),
                    run.trace.seed.to_string(),
                    e.eval_id.to_string(),
                    e.iteration.to_string(),
                    num(e.fitness),
                    serde_json::to_string(&e.hyperparams)?,
                ]);
            }
        }
    }
    mean.write(&dir.join("trace_mean.csv"))?;
    evals.write(&dir.join("evaluations.csv"))?;
    let mut folds = Table::new(&["fold", "mae"]);
    for (f, m) in fold_maes.iter().enumerate() {
        folds.push(vec![(f + 1).to_string(), num(*m)]);
    }
    folds.write(&dir.join("fold_maes.csv"))?;
    write_json(
        &dir.join("tune.json"),
        &Report {
            model: kind,
            best: &best,
            fold_stats: fold_stats(&fold_maes)?,
            campaigns: campaigns
                .iter()
                .map(|(t, c)| CampaignSummary {
                    optimizer: t.clone(),
                    best_fitness: c.best().best.fitness.unwrap_or(f64::INFINITY),
                    best_seed: c.best().trace.seed,
                    mean_best_so_far: c.mean_best_so_far.clone(),
                    evaluations: c.runs.iter().map(|r| r.trace.evaluations).sum(),
                })
                .collect(),
        },
    )?;
    write_json(&tuned_path(cfg, kind), &best)?;
    Ok(format!(
        "{}: best {kind} CV MAE {:.2} kWh via {} (seed {}): {}",
        cfg.dataset,
        fitness,
        best.optimizer,
        best.seed,
        serde_json::to_string(&best.hyperparameters)?
    ))
}
