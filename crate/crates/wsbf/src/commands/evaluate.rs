use anyhow::{Context, Result};
use serde::Serialize;
use wsbf_core::data::{DesignMatrix, FeatureTable, Period, TimeSeriesDataset};
use wsbf_core::evaluation::{fold_stats, forecast_holdout, mae, smape, FoldStats, ForecastResult};
use wsbf_core::learners::{fit, FittedModel, ModelKind};
use wsbf_core::metaheuristics::cv_fold_maes;
use wsbf_core::wsb::{tune_global_weight, wsb_combine, WeightSearch, WsbConfig, WsbResult};

use super::{apply_selection, hyperparams_for, prepare, sub_seed};
use crate::config::{RunConfig, WeightTuningSlice};
use crate::export::{ensure_dir, num, wsb_table, write_json, Table};

#[derive(Debug, Clone, Serialize)]
struct ModelScore {
    model: String,
    role: &'static str,
    mae: f64,
    smape_percent: f64,
    tuned: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    dataset: &'a str,
    horizon: usize,
    test_periods: &'a [Period],
    features: &'a [String],
    weight: f64,
    weight_search: Option<&'a WeightSearch>,
    weight_tuned_on: Option<WeightTuningSlice>,
    metrics: &'a [ModelScore],
    validation: &'a [ModelScore],
    fold_stats: &'a [(String, FoldStats)],
    wsb: &'a WsbResult,
    skipped: &'a [String],
    warnings: &'a [String],
}

struct Fitted {
    kind: ModelKind,
    tuned: bool,
    forecast: ForecastResult,
}

fn fit_forecast(
    cfg: &RunConfig,
    kind: ModelKind,
    design: &DesignMatrix,
    history: &TimeSeriesDataset,
    warnings: &mut Vec<String>,
) -> Result<Fitted> {
    let h = cfg.horizon;
    let (hp, tuned) = hyperparams_for(cfg, kind)?;
    let seed = sub_seed(cfg, &format!("evaluate-{kind}"));
    let model: FittedModel = if kind.is_smoothing() {
        let y = &history.target()[..history.len() - h];
        fit(kind, &FeatureTable::empty(Vec::new()), y, &hp, seed)?
    } else {
        fit(kind, &design.features, &design.target, &hp, seed)?
    };
    warnings.extend(model.warnings.iter().map(|w| format!("{kind}: {w}")));
    let forecast =
        forecast_holdout(&model, &design.spec, history, h).with_context(|| format!("forecasting with {kind}"))?;
    Ok(Fitted { kind, tuned, forecast })
}

fn score(kind: &str, role: &'static str, tuned: bool, actual: &[f64], pred: &[f64]) -> Result<ModelScore> {
    Ok(ModelScore {
        model: kind.to_string(),
        role,
        mae: mae(actual, pred)?,
        smape_percent: 100.0 * smape(actual, pred)?,
        tuned,
    })
}

pub fn run(cfg: &RunConfig) -> Result<String> {
    let h = cfg.horizon;
    let prep = prepare(cfg)?;
    let train = apply_selection(cfg, &prep.train())?;
    let ds = &prep.imputed;
    let actual = &ds.target()[ds.len() - h..];
    let mut warnings = Vec::new();

    let strong = fit_forecast(cfg, cfg.strong_model, &train, ds, &mut warnings)?;
    let weak: Vec<Fitted> = cfg
        .weak_models
        .iter()
        .map(|&k| fit_forecast(cfg, k, &train, ds, &mut warnings))
        .collect::<Result<_>>()?;
    let weak_preds: Vec<Vec<f64>> = weak.iter().map(|f| f.forecast.predicted.clone()).collect();

    // Validation: the last `h` training periods, forecast by models refit
    // on the rows before them.
    let val_train = train.head(train.len().saturating_sub(h));
    let val_hist = ds.head(ds.len() - h);
    let validation = if val_train.len() > cfg.folds.max(1) && val_train.len() > h {
        let s = fit_forecast(cfg, cfg.strong_model, &val_train, &val_hist, &mut Vec::new())?;
        let w: Vec<Vec<f64>> = cfg
            .weak_models
            .iter()
            .map(|&k| fit_forecast(cfg, k, &val_train, &val_hist, &mut Vec::new()).map(|f| f.forecast.predicted))
            .collect::<Result<_>>()?;
        Some((s.forecast, w))
    } else {
        warnings.push(format!("{} training rows leave no validation window", train.len()));
        None
    };

    let base = |w: f64| WsbConfig { w, h };
    // Candidate weights are scored by sMAPE of the combined forecast.
    let combined_smape = |strong: &[f64], weak: &[Vec<f64>], truth: &[f64], w: f64| -> f64 {
        match wsb_combine(strong, weak, &base(w)) {
            Ok(r) => smape(truth, &r.combined).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };
    let wsb_seed = sub_seed(cfg, "wsb-weight");
    let (weight, search, tuned_on) = match (cfg.wsb.tune, cfg.wsb.tune_on, &validation) {
        (true, WeightTuningSlice::Validation, Some((s, w))) => {
            let truth = s.actual.clone().unwrap_or_default();
            let ws = tune_global_weight(&|x| combined_smape(&s.predicted, w, &truth, x), cfg.wsb.samples, wsb_seed)?;
            (ws.best_w, Some(ws), Some(WeightTuningSlice::Validation))
        }
        (true, WeightTuningSlice::Test, _) => {
            let ws = tune_global_weight(
                &|x| combined_smape(&strong.forecast.predicted, &weak_preds, actual, x),
                cfg.wsb.samples,
                wsb_seed,
            )?;
            (ws.best_w, Some(ws), Some(WeightTuningSlice::Test))
        }
        _ => (cfg.wsb.w, None, None),
    };
    let wsb = wsb_combine(&strong.forecast.predicted, &weak_preds, &base(weight))?;

    let mut metrics = vec![
        score("wsb", "combined", strong.tuned, actual, &wsb.combined)?,
        score(strong.kind.token(), "strong", strong.tuned, actual, &strong.forecast.predicted)?,
    ];
    for f in &weak {
        metrics.push(score(f.kind.token(), "weak", f.tuned, actual, &f.forecast.predicted)?);
    }
    let mut skipped = Vec::new();
    let mut benchmarks = Vec::new();
    let extra = ModelKind::SMOOTHING
        .iter()
        .chain(std::iter::once(&ModelKind::Esn))
        .filter(|k| **k != cfg.strong_model && !cfg.weak_models.contains(k));
    for &k in extra {
        match fit_forecast(cfg, k, &train, ds, &mut warnings) {
            Ok(f) => {
                metrics.push(score(k.token(), "benchmark", f.tuned, actual, &f.forecast.predicted)?);
                benchmarks.push(f);
            }
            Err(e) => skipped.push(format!("{k}: {e:#}")),
        }
    }

    let mut val_scores = Vec::new();
    if let Some((s, w)) = &validation {
        let truth = s.actual.clone().unwrap_or_default();
        val_scores.push(score(cfg.strong_model.token(), "strong", strong.tuned, &truth, &s.predicted)?);
        let vw = wsb_combine(&s.predicted, w, &base(weight))?;
        val_scores.push(score("wsb", "combined", strong.tuned, &truth, &vw.combined)?);
        let v0 = wsb_combine(&s.predicted, w, &base(0.0))?;
        val_scores.push(score("wsb_w0", "combined", strong.tuned, &truth, &v0.combined)?);
    }

    let cv_seed = sub_seed(cfg, "evaluate-cv");
    let mut folds = Vec::new();
    for f in std::iter::once(&strong).chain(&weak) {
        let (hp, _) = hyperparams_for(cfg, f.kind)?;
        let maes = cv_fold_maes(f.kind, &train, &hp, cfg.folds, cv_seed, 0)?;
        folds.push((f.kind.to_string(), fold_stats(&maes)?));
    }

    let dir = ensure_dir(&cfg.command_dir("evaluate"))?;
    let mut mt = Table::new(&["model", "role", "mae", "smape_percent", "tuned"]);
    for m in &metrics {
        mt.push(vec![m.model.clone(), m.role.into(), num(m.mae), num(m.smape_percent), m.tuned.to_string()]);
    }
    mt.write(&dir.join("metrics.csv"))?;
    let mut vt = Table::new(&["model", "role", "mae", "smape_percent"]);
    for m in &val_scores {
        vt.push(vec![m.model.clone(), m.role.into(), num(m.mae), num(m.smape_percent)]);
    }
    vt.write(&dir.join("validation_metrics.csv"))?;

    let periods = &strong.forecast.periods;
    let mut header: Vec<String> = vec!["t".into(), "period".into(), "actual".into(), "wsb".into()];
    let all: Vec<&Fitted> = std::iter::once(&strong).chain(&weak).chain(&benchmarks).collect();
    header.extend(all.iter().map(|f| f.kind.to_string()));
    let mut ft = Table::with_header(header);
    for t in 0..h {
        let mut row = vec![(t + 1).to_string(), periods[t].to_string(), num(actual[t]), num(wsb.combined[t])];
        row.extend(all.iter().map(|f| num(f.forecast.predicted[t])));
        ft.push(row);
    }
    ft.write(&dir.join("forecast.csv"))?;
    let mut fa = Table::new(&["period", "model", "predicted", "actual", "abs_error"]);
    let wsb_named = ("wsb".to_string(), &wsb.combined);
    let named: Vec<(String, &Vec<f64>)> = std::iter::once(wsb_named)
        .chain(all.iter().map(|f| (f.kind.to_string(), &f.forecast.predicted)))
        .collect();
    for (name, pred) in &named {
        for t in 0..h {
            fa.push(vec![
                periods[t].to_string(),
                name.clone(),
                num(pred[t]),
                num(actual[t]),
                num((pred[t] - actual[t]).abs()),
            ]);
        }
    }
    fa.write(&dir.join("forecast_vs_actual.csv"))?;
    wsb_table(&wsb, periods).write(&dir.join("wsb.csv"))?;
    let mut fs = Table::new(&["model", "mean_mae", "median_mae", "sd_mae"]);
    for (m, s) in &folds {
        fs.push(vec![m.clone(), num(s.mean), num(s.median), num(s.sd)]);
    }
    fs.write(&dir.join("fold_stats.csv"))?;
    if let Some(ws) = &search {
        let mut st = Table::new(&["w", "smape"]);
        for (w, s) in &ws.evaluated {
            st.push(vec![num(*w), num(*s)]);
        }
        st.write(&dir.join("weight_search.csv"))?;
    }
    write_json(
        &dir.join("evaluate.json"),
        &Report {
            dataset: &cfg.dataset,
            horizon: h,
            test_periods: periods,
            features: train.feature_names(),
            weight,
            weight_search: search.as_ref(),
            weight_tuned_on: tuned_on,
            metrics: &metrics,
            validation: &val_scores,
            fold_stats: &folds,
            wsb: &wsb,
            skipped: &skipped,
            warnings: &warnings,
        },
    )?;
    Ok(format!(
        "{}: WSB MAE {:.2} kWh, sMAPE {:.2}% (w={weight:.4}); {} MAE {:.2} kWh, sMAPE {:.2}%",
        cfg.dataset,
        metrics[0].mae,
        metrics[0].smape_percent,
        cfg.strong_model,
        metrics[1].mae,
        metrics[1].smape_percent
    ))
}
