use alloc::format;
use alloc::vec::Vec;

use crate::data::{DesignMatrix, FeatureTable};
use crate::error::{Error, Result};
use crate::evaluation::{contiguous_folds, mae};
use crate::learners::{fit, Hyperparams, ModelKind, Regressor};
use crate::rng;

use super::Objective;

/// Held-out MAE of each of `k` contiguous folds. Fold `f` of candidate
/// `candidate` is fitted with seed `derive(seed, [candidate, f])`.
pub fn cv_fold_maes(
    kind: ModelKind,
    design: &DesignMatrix,
    hp: &Hyperparams,
    k: usize,
    seed: u64,
    candidate: u64,
) -> Result<Vec<f64>> {
    let folds = contiguous_folds(design.len(), k)?;
    let mut out = Vec::with_capacity(k);
    for (f, held) in folds.iter().enumerate() {
        let train_idx: Vec<usize> = (0..design.len()).filter(|i| !held.contains(i)).collect();
        let test_idx: Vec<usize> = held.clone().collect();
        let train = design.rows(&train_idx);
        let test = design.rows(&test_idx);
        let model = fit(
            kind,
            &train.features,
            &train.target,
            hp,
            rng::derive(seed, &[candidate, f as u64]),
        )?;
        let pred = model.predict(&FeatureTable {
            names: test.features.names.clone(),
            values: test.features.values.clone(),
        })?;
        if pred.iter().any(|p| !p.is_finite()) {
            return Err(Error::Divergence(format!("{kind} produced a non-finite prediction in fold {f}")));
        }
        out.push(mae(&test.target, &pred)?);
    }
    Ok(out)
}

/// Mean k-fold MAE in kWh; any failing fold makes the candidate `+inf`.
pub struct CvObjective<'a> {
    pub kind: ModelKind,
    pub design: &'a DesignMatrix,
    pub k: usize,
    pub seed: u64,
}

impl Objective for CvObjective<'_> {
    fn evaluate(&self, hp: &Hyperparams, eval_id: u64) -> f64 {
        match cv_fold_maes(self.kind, self.design, hp, self.k, self.seed, eval_id) {
            Ok(m) => m.iter().sum::<f64>() / m.len() as f64,
            Err(_) => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_design_matrix, DesignConfig, ExogColumn, Period, TimeSeriesDataset};
    use crate::learners::{default_hyperparams, HpValue};
    use alloc::vec;

    fn design(n: usize) -> DesignMatrix {
        let start = Period::new(2015, 1).unwrap();
        let periods: Vec<Period> = (0..n as i64).map(|i| start.add_months(i)).collect();
        let y: Vec<f64> = (0..n).map(|i| 100.0 + (i % 12) as f64 * 3.0 + i as f64).collect();
        let t: Vec<Option<f64>> = (0..n).map(|i| Some(20.0 + (i % 7) as f64)).collect();
        let ds = TimeSeriesDataset::new(
            "synthetic",
            periods,
            y,
            vec![ExogColumn {
                name: "temp".into(),
                values: t,
            }],
        )
        .unwrap();
        build_design_matrix(&ds, &DesignConfig::default()).unwrap()
    }

    #[test]
    fn fitness_is_mean_of_fold_maes() {
        let d = design(67);
        assert_eq!(d.len(), 55);
        let hp = default_hyperparams(ModelKind::Rf);
        let folds = cv_fold_maes(ModelKind::Rf, &d, &hp, 5, 4, 9).unwrap();
        assert_eq!(folds.len(), 5);
        let obj = CvObjective {
            kind: ModelKind::Rf,
            design: &d,
            k: 5,
            seed: 4,
        };
        let want = folds.iter().sum::<f64>() / 5.0;
        assert_eq!(obj.evaluate(&hp, 9), want);
        assert_eq!(obj.evaluate(&hp, 9), obj.evaluate(&hp, 9));
    }

    #[test]
    fn perfect_predictor_scores_zero() {
        // Depth-limited trees on a constant target predict it exactly.
        let mut d = design(40);
        for t in d.target.iter_mut() {
            *t = 42.0;
        }
        let obj = CvObjective {
            kind: ModelKind::Gbt,
            design: &d,
            k: 5,
            seed: 1,
        };
        assert_eq!(obj.evaluate(&default_hyperparams(ModelKind::Gbt), 0), 0.0);
    }

    #[test]
    fn failures_become_infinite() {
        let d = design(40);
        let obj = CvObjective {
            kind: ModelKind::Rf,
            design: &d,
            k: 5,
            seed: 1,
        };
        let bad = default_hyperparams(ModelKind::Rf).with("n_estimators", HpValue::Int(0));
        assert_eq!(obj.evaluate(&bad, 0), f64::INFINITY);
        let too_many = CvObjective { k: 500, ..obj };
        assert_eq!(too_many.evaluate(&default_hyperparams(ModelKind::Rf), 0), f64::INFINITY);
    }
}
