//! Interventional Shapley attribution, importance ranking and backward
//! feature elimination.
//!
//! The value of a coalition `S` for instance `x` is the model's mean output
//! over background rows whose `S` columns are overwritten with `x`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::DesignMatrix;
use crate::error::{Error, Result};
use crate::evaluation::mae;
use crate::learners::{fit, Hyperparams, ModelKind, Regressor};
use crate::linalg::Matrix;
use crate::rng;

/// Coalition enumeration costs `2^m` value evaluations per instance.
pub const EXACT_FEATURE_LIMIT: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ShapleyMethod {
    Exact,
    /// `permutations` antithetic pairs (an ordering and its reverse).
    Sampled { permutations: usize, seed: u64 },
    /// Every one of the `m!` orderings once.
    Exhaustive,
}

impl ShapleyMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            ShapleyMethod::Exact => "exact",
            ShapleyMethod::Sampled { .. } => "sampled",
            ShapleyMethod::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionReport {
    pub feature_names: Vec<String>,
    /// Mean model output over the background rows.
    pub base_value: f64,
    /// `phi[i][j]`: contribution of feature `j` to instance `i`, in kWh.
    pub phi: Vec<Vec<f64>>,
    /// Monte-Carlo standard errors, sampled mode only.
    pub std_err: Option<Vec<Vec<f64>>>,
    pub predictions: Vec<f64>,
    pub instances: Matrix,
    pub background_rows: usize,
    pub method: ShapleyMethod,
}

fn value_batch(model: &dyn Regressor, x: &[f64], background: &Matrix, coalitions: &[Vec<bool>]) -> Result<Vec<f64>> {
    let nb = background.rows();
    let m = background.cols();
    let mut data = Vec::with_capacity(coalitions.len() * nb * m);
    for s in coalitions {
        for b in background.iter_rows() {
            data.extend((0..m).map(|j| if s[j] { x[j] } else { b[j] }));
        }
    }
    let pred = model.predict_matrix(&Matrix::from_vec(coalitions.len() * nb, m, data)?)?;
    Ok(pred.chunks(nb).map(|c| c.iter().sum::<f64>() / nb as f64).collect())
}

fn check_inputs(model: &dyn Regressor, x: &[f64], background: &Matrix) -> Result<()> {
    if background.rows() == 0 {
        return Err(Error::EmptyInput("background set is empty"));
    }
    let m = model.feature_names().len();
    if x.len() != m || background.cols() != m {
        return Err(Error::Contract(format!(
            "model has {m} features; instance has {}, background {}",
            x.len(),
            background.cols()
        )));
    }
    Ok(())
}

/// Shapley values by coalition enumeration.
pub fn exact_shapley(model: &dyn Regressor, x: &[f64], background: &Matrix) -> Result<Vec<f64>> {
    check_inputs(model, x, background)?;
    let m = x.len();
    if m > EXACT_FEATURE_LIMIT {
        return Err(Error::TooManyFeatures(m, EXACT_FEATURE_LIMIT));
    }
    let masks: Vec<Vec<bool>> = (0..1usize << m)
        .map(|s| (0..m).map(|j| s >> j & 1 == 1).collect())
        .collect();
    let v = value_batch(model, x, background, &masks)?;
    // |S|! (m - |S| - 1)! / m!
    let mut fact = vec![1.0f64; m + 1];
    for i in 1..=m {
        fact[i] = fact[i - 1] * i as f64;
    }
    let mut phi = vec![0.0; m];
    for (i, p) in phi.iter_mut().enumerate() {
        for s in 0..1usize << m {
            if s >> i & 1 == 1 {
                continue;
            }
            let size = s.count_ones() as usize;
            let w = fact[size] * fact[m - size - 1] / fact[m];
            *p += w * (v[s | 1 << i] - v[s]);
        }
    }
    Ok(phi)
}

/// Marginal contributions along `order`; they sum to `f(x) - base`.
fn ordering_contributions(
    model: &dyn Regressor,
    x: &[f64],
    background: &Matrix,
    order: &[usize],
) -> Result<Vec<f64>> {
    let m = x.len();
    let mut masks = Vec::with_capacity(m + 1);
    let mut s = vec![false; m];
    masks.push(s.clone());
    for &j in order {
        s[j] = true;
        masks.push(s.clone());
    }
    let v = value_batch(model, x, background, &masks)?;
    let mut out = vec![0.0; m];
    for (k, &j) in order.iter().enumerate() {
        out[j] = v[k + 1] - v[k];
    }
    Ok(out)
}

/// Antithetic permutation estimate with per-feature standard errors.
pub fn sampled_shapley(
    model: &dyn Regressor,
    x: &[f64],
    background: &Matrix,
    permutations: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_inputs(model, x, background)?;
    if permutations == 0 {
        return Err(Error::Contract("at least one permutation is required".into()));
    }
    let m = x.len();
    let mut r = rng::rng_from(seed);
    let mut order: Vec<usize> = (0..m).collect();
    let mut sum = vec![0.0; m];
    let mut sum_sq = vec![0.0; m];
    for _ in 0..permutations {
        order.shuffle(&mut r);
        let a = ordering_contributions(model, x, background, &order)?;
        let rev: Vec<usize> = order.iter().rev().copied().collect();
        let b = ordering_contributions(model, x, background, &rev)?;
        for j in 0..m {
            let pair = 0.5 * (a[j] + b[j]);
            sum[j] += pair;
            sum_sq[j] += pair * pair;
        }
    }
    let n = permutations as f64;
    let phi: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let se = (0..m)
        .map(|j| {
            if permutations < 2 {
                return 0.0;
            }
            let var = ((sum_sq[j] - n * phi[j] * phi[j]) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        })
        .collect();
    Ok((phi, se))
}

/// Averages the contributions of all `m!` orderings.
pub fn exhaustive_shapley(model: &dyn Regressor, x: &[f64], background: &Matrix) -> Result<Vec<f64>> {
    check_inputs(model, x, background)?;
    let m = x.len();
    if m > 8 {
        return Err(Error::TooManyFeatures(m, 8));
    }
    let mut order: Vec<usize> = (0..m).collect();
    let mut sum = vec![0.0; m];
    let mut count = 0usize;
    loop {
        let c = ordering_contributions(model, x, background, &order)?;
        for j in 0..m {
            sum[j] += c[j];
        }
        count += 1;
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(sum.into_iter().map(|s| s / count as f64).collect())
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let Some(i) = (0..p.len() - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Attributes every row of `instances` (columns in model order).
pub fn explain(
    model: &dyn Regressor,
    instances: &Matrix,
    background: &Matrix,
    method: ShapleyMethod,
) -> Result<AttributionReport> {
    if background.rows() == 0 {
        return Err(Error::EmptyInput("background set is empty"));
    }
    let base = model.predict_matrix(background)?;
    let base_value = base.iter().sum::<f64>() / base.len() as f64;
    let predictions = model.predict_matrix(instances)?;
    let mut phi = Vec::with_capacity(instances.rows());
    let mut errs = Vec::new();
    for (i, x) in instances.iter_rows().enumerate() {
        match method {
            ShapleyMethod::Exact => phi.push(exact_shapley(model, x, background)?),
            ShapleyMethod::Exhaustive => phi.push(exhaustive_shapley(model, x, background)?),
            ShapleyMethod::Sampled { permutations, seed } => {
                let (p, se) = sampled_shapley(model, x, background, permutations, rng::derive(seed, &[i as u64]))?;
                phi.push(p);
                errs.push(se);
            }
        }
    }
    Ok(AttributionReport {
        feature_names: model.feature_names().to_vec(),
        base_value,
        phi,
        std_err: matches!(method, ShapleyMethod::Sampled { .. }).then_some(errs),
        predictions,
        instances: instances.clone(),
        background_rows: background.rows(),
        method,
    })
}

/// Up to `cap` rows drawn uniformly without replacement, kept in their
/// original order.
pub fn subsample_background(x: &Matrix, cap: usize, seed: u64) -> Matrix {
    if x.rows() <= cap {
        return x.clone();
    }
    let mut idx: Vec<usize> = (0..x.rows()).collect();
    idx.shuffle(&mut rng::rng_from(seed));
    idx.truncate(cap);
    idx.sort_unstable();
    x.select_rows(&idx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub feature: String,
    pub importance: f64,
}

/// Mean |phi| per feature, averaged across reports; descending, ties in
/// name order.
pub fn mean_abs_importance(reports: &[AttributionReport]) -> Result<Vec<Importance>> {
    let Some(first) = reports.first() else {
        return Err(Error::EmptyInput("no attribution reports"));
    };
    let names = &first.feature_names;
    let mut acc = vec![0.0; names.len()];
    for r in reports {
        if &r.feature_names != names {
            return Err(Error::Contract("reports cover different feature sets".into()));
        }
        if r.phi.is_empty() {
            return Err(Error::EmptyInput("report without instances"));
        }
        for j in 0..names.len() {
            acc[j] += r.phi.iter().map(|p| p[j].abs()).sum::<f64>() / r.phi.len() as f64;
        }
    }
    let mut out: Vec<Importance> = names
        .iter()
        .zip(acc)
        .map(|(n, a)| Importance {
            feature: n.clone(),
            importance: a / reports.len() as f64,
        })
        .collect();
    out.sort_by(|a, b| {
        b.importance
            .total_cmp(&a.importance)
            .then_with(|| a.feature.cmp(&b.feature))
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceContribution {
    pub feature: String,
    pub mean_phi: f64,
    pub mean_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcePlot {
    pub base_value: f64,
    pub contributions: Vec<ForceContribution>,
    /// Base value plus every mean contribution.
    pub endpoint: f64,
}

pub fn force_plot_data(report: &AttributionReport) -> ForcePlot {
    let n = report.phi.len().max(1) as f64;
    let mut contributions: Vec<ForceContribution> = report
        .feature_names
        .iter()
        .enumerate()
        .map(|(j, name)| ForceContribution {
            feature: name.clone(),
            mean_phi: report.phi.iter().map(|p| p[j]).sum::<f64>() / n,
            mean_value: report.instances.column(j).iter().sum::<f64>() / n,
        })
        .collect();
    contributions.sort_by(|a, b| {
        b.mean_phi
            .abs()
            .total_cmp(&a.mean_phi.abs())
            .then_with(|| a.feature.cmp(&b.feature))
    });
    let endpoint = report.base_value + contributions.iter().map(|c| c.mean_phi).sum::<f64>();
    ForcePlot {
        base_value: report.base_value,
        contributions,
        endpoint,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationConfig {
    /// Most features that may be removed.
    pub cap: usize,
    /// Trailing training rows held out to score each step.
    pub validation_rows: usize,
    pub background_cap: usize,
    /// Feature counts up to this use exact enumeration.
    pub exact_limit: usize,
    /// Antithetic pairs per instance above `exact_limit`.
    pub permutations: usize,
    pub seed: u64,
}

impl Default for EliminationConfig {
    fn default() -> Self {
        Self {
            cap: 40,
            validation_rows: 12,
            background_cap: 100,
            exact_limit: EXACT_FEATURE_LIMIT,
            permutations: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationStep {
    pub step: usize,
    /// `None` for the starting full feature set.
    pub removed: Option<String>,
    pub remaining: usize,
    pub mae_rf: f64,
    pub mae_gbt: f64,
    pub mae_avg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationTrace {
    pub ranking: Vec<Importance>,
    pub steps: Vec<EliminationStep>,
    pub chosen: usize,
    pub final_features: Vec<String>,
    pub reports: Vec<AttributionReport>,
}

/// Exact enumeration up to `exact_limit` features (capped at
/// [`EXACT_FEATURE_LIMIT`]), sampling above.
pub fn default_method(m: usize, exact_limit: usize, permutations: usize, seed: u64) -> ShapleyMethod {
    if m <= exact_limit.min(EXACT_FEATURE_LIMIT) {
        ShapleyMethod::Exact
    } else {
        ShapleyMethod::Sampled { permutations, seed }
    }
}

/// Ranks features once by mean |phi| of RF and GBT, then drops the least
/// important one at a time, scoring each step on the held-out tail of
/// `design` (which must exclude the test window).
pub fn backward_elimination(
    design: &DesignMatrix,
    rf_hp: &Hyperparams,
    gbt_hp: &Hyperparams,
    cfg: &EliminationConfig,
) -> Result<EliminationTrace> {
    let m = design.feature_names().len();
    if cfg.cap >= m {
        return Err(Error::Contract(format!(
            "elimination cap {} must be below the feature count {m}",
            cfg.cap
        )));
    }
    if design.len() <= cfg.validation_rows {
        return Err(Error::InsufficientData(format!(
            "{} rows cannot hold out {} validation rows",
            design.len(),
            cfg.validation_rows
        )));
    }
    let fit_part = design.head(design.len() - cfg.validation_rows);
    let val = design.tail(cfg.validation_rows);
    let fit_seed = rng::derive_named(cfg.seed, "elimination-fit");

    let rf = fit(ModelKind::Rf, &fit_part.features, &fit_part.target, rf_hp, fit_seed)?;
    let gbt = fit(ModelKind::Gbt, &fit_part.features, &fit_part.target, gbt_hp, fit_seed)?;
    let background = subsample_background(
        fit_part.x(),
        cfg.background_cap,
        rng::derive_named(cfg.seed, "background"),
    );
    let method = default_method(m, cfg.exact_limit, cfg.permutations, rng::derive_named(cfg.seed, "permutations"));
    let reports = vec![
        explain(&rf, fit_part.x(), &background, method)?,
        explain(&gbt, fit_part.x(), &background, method)?,
    ];
    let ranking = mean_abs_importance(&reports)?;

    let score = |names: &[String]| -> Result<(f64, f64)> {
        let tr = fit_part.select_features(names)?;
        let va = val.select_features(names)?;
        let a = fit(ModelKind::Rf, &tr.features, &tr.target, rf_hp, fit_seed)?;
        let b = fit(ModelKind::Gbt, &tr.features, &tr.target, gbt_hp, fit_seed)?;
        Ok((
            mae(&va.target, &a.predict(&va.features)?)?,
            mae(&va.target, &b.predict(&va.features)?)?,
        ))
    };

    let mut remaining: Vec<String> = design.feature_names().to_vec();
    let mut steps = Vec::with_capacity(cfg.cap + 1);
    for step in 0..=cfg.cap {
        let removed = if step == 0 {
            None
        } else {
            let name = ranking[m - step].feature.clone();
            remaining.retain(|n| n != &name);
            Some(name)
        };
        let (mae_rf, mae_gbt) = score(&remaining)?;
        steps.push(EliminationStep {
            step,
            removed,
            remaining: remaining.len(),
            mae_rf,
            mae_gbt,
            mae_avg: 0.5 * (mae_rf + mae_gbt),
        });
    }
    let chosen = steps
        .iter()
        .enumerate()
        .fold(0, |best, (i, s)| if s.mae_avg < steps[best].mae_avg { i } else { best });
    let dropped: Vec<&String> = steps[1..=chosen].iter().filter_map(|s| s.removed.as_ref()).collect();
    let final_features = design
        .feature_names()
        .iter()
        .filter(|n| !dropped.contains(n))
        .map(|n| n.to_string())
        .collect();
    Ok(EliminationTrace {
        ranking,
        steps,
        chosen,
        final_features,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureSpec, FeatureTable, Period};
    use crate::learners::default_hyperparams;
    use rand::Rng as _;

    struct FnModel<F: Fn(&[f64]) -> f64> {
        names: Vec<String>,
        f: F,
    }

    impl<F: Fn(&[f64]) -> f64> FnModel<F> {
        fn new(m: usize, f: F) -> Self {
            Self {
                names: (0..m).map(|j| format!("f{}", j + 1)).collect(),
                f,
            }
        }
    }

    impl<F: Fn(&[f64]) -> f64> Regressor for FnModel<F> {
        fn feature_names(&self) -> &[String] {
            &self.names
        }

        fn predict_matrix(&self, x: &Matrix) -> Result<Vec<f64>> {
            Ok(x.iter_rows().map(|r| (self.f)(r)).collect())
        }
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut r = rng::rng_from(seed);
        let data = (0..rows * cols).map(|_| r.random_range(-2.0..2.0)).collect();
        Matrix::from_vec(rows, cols, data).unwrap()
    }

    fn nonlinear(x: &[f64]) -> f64 {
        x[0] * x[1] + (x[2] * 0.7).sin() * 3.0 + x[0].max(x[2])
    }

    #[test]
    fn additive_model_closed_form() {
        let model = FnModel::new(2, |x| x[0] + x[1]);
        let bg = random_matrix(20, 2, 1);
        let x = [1.5, -0.5];
        let phi = exact_shapley(&model, &x, &bg).unwrap();
        for j in 0..2 {
            let mean = bg.column(j).iter().sum::<f64>() / 20.0;
            assert!((phi[j] - (x[j] - mean)).abs() < 1e-12);
        }
    }

    #[test]
    fn null_game_and_single_player() {
        let model = FnModel::new(3, |_| 5.0);
        let bg = random_matrix(10, 3, 2);
        assert_eq!(exact_shapley(&model, &[1.0, 2.0, 3.0], &bg).unwrap(), [0.0; 3]);
        let (phi, se) = sampled_shapley(&model, &[1.0, 2.0, 3.0], &bg, 5, 0).unwrap();
        assert_eq!(phi, [0.0; 3]);
        assert_eq!(se, [0.0; 3]);

        let model = FnModel::new(1, |x| x[0] * x[0]);
        let bg = random_matrix(10, 1, 3);
        let base = bg.column(0).iter().map(|v| v * v).sum::<f64>() / 10.0;
        let phi = exact_shapley(&model, &[1.7], &bg).unwrap();
        assert!((phi[0] - (1.7 * 1.7 - base)).abs() < 1e-12);
    }

    #[test]
    fn efficiency_symmetry_null_player() {
        // f ignores column 3; columns 0 and 1 enter symmetrically.
        let model = FnModel::new(4, |x| x[0] * x[1] + x[0] + x[1] + x[2].exp());
        let mut bg = random_matrix(15, 4, 4);
        for i in 0..15 {
            bg[(i, 1)] = bg[(i, 0)];
        }
        let x = [0.3, 0.3, -1.0, 9.0];
        let rep = explain(&model, &Matrix::from_rows(&[x.to_vec()]).unwrap(), &bg, ShapleyMethod::Exact).unwrap();
        let phi = &rep.phi[0];
        assert!((rep.base_value + phi.iter().sum::<f64>() - rep.predictions[0]).abs() < 1e-9);
        assert!((phi[0] - phi[1]).abs() < 1e-12);
        assert_eq!(phi[3], 0.0);
    }

    #[test]
    fn exhaustive_equals_exact() {
        let model = FnModel::new(4, |x| nonlinear(x) + x[3] * x[0]);
        let bg = random_matrix(8, 4, 5);
        let x = [0.4, -1.2, 1.9, 0.1];
        let a = exact_shapley(&model, &x, &bg).unwrap();
        let b = exhaustive_shapley(&model, &x, &bg).unwrap();
        for j in 0..4 {
            assert!((a[j] - b[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_within_four_standard_errors() {
        let model = FnModel::new(3, nonlinear);
        let bg = random_matrix(12, 3, 6);
        let x = [1.1, -0.7, 1.6];
        let exact = exact_shapley(&model, &x, &bg).unwrap();
        let (phi, se) = sampled_shapley(&model, &x, &bg, 2000, 11).unwrap();
        for j in 0..3 {
            assert!((phi[j] - exact[j]).abs() <= 4.0 * se[j] + 1e-12, "{j}: {} vs {}", phi[j], exact[j]);
        }
        let f = model.predict_matrix(&Matrix::from_rows(&[x.to_vec()]).unwrap()).unwrap()[0];
        let base = model.predict_matrix(&bg).unwrap().iter().sum::<f64>() / 12.0;
        assert!((base + phi.iter().sum::<f64>() - f).abs() < 1e-9);
    }

    #[test]
    fn sampled_mean_over_seeds_is_unbiased() {
        let model = FnModel::new(3, nonlinear);
        let bg = random_matrix(6, 3, 7);
        let x = [-0.4, 1.3, 0.8];
        let exact = exact_shapley(&model, &x, &bg).unwrap();
        let runs: Vec<Vec<f64>> = (0..400).map(|s| sampled_shapley(&model, &x, &bg, 1, s).unwrap().0).collect();
        for j in 0..3 {
            let v: Vec<f64> = runs.iter().map(|r| r[j]).collect();
            let mean = v.iter().sum::<f64>() / 400.0;
            let sd = (v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / 399.0).sqrt();
            assert!((mean - exact[j]).abs() <= 4.0 * sd / 20.0 + 1e-12);
        }
    }

    #[test]
    fn exact_refuses_wide_models() {
        let model = FnModel::new(16, |x| x[0]);
        let bg = random_matrix(2, 16, 8);
        assert!(matches!(
            exact_shapley(&model, &[0.0; 16], &bg),
            Err(Error::TooManyFeatures(16, 15))
        ));
    }

    fn report(names: &[&str], phi: Vec<Vec<f64>>) -> AttributionReport {
        let m = names.len();
        AttributionReport {
            feature_names: names.iter().map(|s| s.to_string()).collect(),
            base_value: 100.0,
            instances: Matrix::zeros(phi.len(), m),
            predictions: vec![0.0; phi.len()],
            phi,
            std_err: None,
            background_rows: 1,
            method: ShapleyMethod::Exact,
        }
    }

    #[test]
    fn importance_ranking() {
        let r = report(&["b", "a"], vec![vec![1.0, -1.0], vec![3.0, -3.0]]);
        let rank = mean_abs_importance(&[r]).unwrap();
        assert_eq!(rank[0].feature, "a");
        assert_eq!(rank[0].importance, 2.0);
        assert_eq!(rank[1].importance, 2.0);

        let r1 = report(&["f1", "f2"], vec![vec![4.0, 0.0]]);
        let r2 = report(&["f1", "f2"], vec![vec![0.0, -2.0]]);
        let rank = mean_abs_importance(&[r1.clone(), r2]).unwrap();
        assert_eq!((rank[0].feature.as_str(), rank[0].importance), ("f1", 2.0));
        assert_eq!(rank[1].importance, 1.0);

        let other = report(&["f1", "f3"], vec![vec![0.0, 0.0]]);
        assert!(matches!(mean_abs_importance(&[r1, other]), Err(Error::Contract(_))));
    }

    #[test]
    fn force_plot_orders_by_magnitude() {
        let r = report(&["b", "a"], vec![vec![-5.0, 10.0]]);
        let fp = force_plot_data(&r);
        assert_eq!(fp.contributions[0].feature, "a");
        assert_eq!(fp.contributions[1].mean_phi, -5.0);
        assert_eq!(fp.endpoint, 105.0);
        let z = force_plot_data(&report(&["a"], vec![vec![0.0]]));
        assert_eq!(z.endpoint, 100.0);
    }

    fn signal_design(n: usize) -> DesignMatrix {
        let mut r = rng::rng_from(21);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let f1: f64 = r.random_range(0.0..10.0);
            let f2: f64 = r.random_range(0.0..10.0);
            let f3: f64 = r.random_range(0.0..10.0);
            y.push(10.0 * f1 + r.random_range(-0.5..0.5));
            rows.push(vec![f1, f2, f3]);
        }
        let start = Period::new(2010, 1).unwrap();
        DesignMatrix {
            periods: (0..n as i64).map(|i| start.add_months(i)).collect(),
            features: FeatureTable::new(
                vec!["f1".into(), "f2".into(), "f3".into()],
                Matrix::from_rows(&rows).unwrap(),
            )
            .unwrap(),
            target: y,
            spec: FeatureSpec {
                lags: Vec::new(),
                exog: Vec::new(),
                years: Vec::new(),
                covid_start: start,
                covid_end: start,
            },
        }
    }

    #[test]
    fn elimination_drops_noise_first() {
        let d = signal_design(60);
        let cfg = EliminationConfig {
            cap: 2,
            ..EliminationConfig::default()
        };
        let rf = default_hyperparams(ModelKind::Rf);
        let gbt = default_hyperparams(ModelKind::Gbt);
        let t = backward_elimination(&d, &rf, &gbt, &cfg).unwrap();
        assert_eq!(t.ranking[0].feature, "f1");
        assert_eq!(t.steps.len(), 3);
        assert!(t.steps.iter().all(|s| s.removed.as_deref() != Some("f1")));
        assert!(t.final_features.contains(&"f1".to_string()));
        for (i, s) in t.steps.iter().enumerate() {
            assert_eq!(s.remaining, 3 - i);
            assert!(t.steps[t.chosen].mae_avg <= s.mae_avg);
        }

        let none = backward_elimination(&d, &rf, &gbt, &EliminationConfig { cap: 0, ..cfg.clone() }).unwrap();
        assert_eq!(none.steps.len(), 1);
        assert_eq!(none.final_features, d.feature_names());
        assert!(backward_elimination(&d, &rf, &gbt, &EliminationConfig { cap: 3, ..cfg }).is_err());
    }

    #[test]
    fn background_subsample_is_capped_and_ordered() {
        let x = Matrix::from_rows(&(0..150).map(|i| vec![i as f64]).collect::<Vec<_>>()).unwrap();
        let b = subsample_background(&x, 100, 3);
        assert_eq!(b.rows(), 100);
        assert!(b.column(0).windows(2).all(|w| w[0] < w[1]));
        assert_eq!(b, subsample_background(&x, 100, 3));
        assert_eq!(subsample_background(&x, 200, 3), x);
    }
}
