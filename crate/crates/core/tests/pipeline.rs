//! Design matrix, learners, recursive forecasts and WSB on one synthetic
//! series.

use wsbf_core::data::{build_design_matrix, lag_name, DesignConfig, ExogColumn, Period, TimeSeriesDataset};
use wsbf_core::evaluation::{forecast_holdout, hybrid_split, mae};
use wsbf_core::learners::{default_hyperparams, fit, HpValue, ModelKind};
use wsbf_core::wsb::{wsb_combine, WsbConfig};

fn dataset() -> TimeSeriesDataset {
    let p0 = Period::new(2018, 1).unwrap();
    let n = 79;
    let periods = (0..n as i64).map(|i| p0.add_months(i)).collect();
    let y = (0..n)
        .map(|i| 15_000.0 + 2_500.0 * ((i % 12) as f64 / 12.0 * std::f64::consts::TAU).sin() + 15.0 * i as f64)
        .collect();
    let mut temp: Vec<Option<f64>> = (0..n).map(|i| Some(22.0 + ((i * 5) % 7) as f64)).collect();
    temp[3] = None;
    temp[40] = None;
    TimeSeriesDataset::new("synthetic", periods, y, vec![ExogColumn { name: "avg_temperature".into(), values: temp }])
        .unwrap()
}

#[test]
fn lag_columns_reproduce_the_shifted_target() {
    let ds = dataset().impute_same_month_mean().unwrap();
    let d = build_design_matrix(&ds, &DesignConfig::default()).unwrap();
    assert_eq!(d.len(), 79 - 12);
    for k in 1..=12 {
        let j = d.features.column_index(&lag_name(k)).unwrap();
        for i in 0..d.len() {
            assert_eq!(d.x().row(i)[j], ds.target()[i + 12 - k]);
        }
    }
}

#[test]
fn every_learner_forecasts_the_holdout() {
    let ds = dataset().impute_same_month_mean().unwrap();
    let d = build_design_matrix(&ds, &DesignConfig::default()).unwrap();
    let split = hybrid_split(d.len(), 12, 5).unwrap();
    let train = d.rows(&split.train);
    let mut preds = Vec::new();
    for kind in ModelKind::TUNABLE.iter().chain(ModelKind::SMOOTHING.iter()).copied() {
        let mut hp = default_hyperparams(kind);
        match kind {
            ModelKind::Lstm => {
                hp.set("units", HpValue::Int(6));
                hp.set("epochs", HpValue::Int(10));
            }
            ModelKind::Esn => hp.set("reservoirs", HpValue::Int(40)),
            _ => {}
        }
        let model = if kind.is_smoothing() {
            fit(kind, &train.features, &ds.target()[..ds.len() - 12], &hp, 1).unwrap()
        } else {
            fit(kind, &train.features, &train.target, &hp, 1).unwrap()
        };
        let f = forecast_holdout(&model, &d.spec, &ds, 12).unwrap();
        assert_eq!(f.predicted.len(), 12);
        assert!(f.predicted.iter().all(|v| v.is_finite()), "{kind}");
        assert_eq!(f.periods[0], Period::new(2023, 8).unwrap());
        assert_eq!(f.mae, Some(mae(&ds.target()[67..], &f.predicted).unwrap()));
        preds.push(f.predicted);
    }
    let strong = preds[0].clone();
    let weak = preds[1..4].to_vec();
    let zero = wsb_combine(&strong, &weak, &WsbConfig { w: 0.0, h: 12 }).unwrap();
    assert_eq!(zero.combined, strong);
    let boosted = wsb_combine(&strong, &weak, &WsbConfig::default()).unwrap();
    assert_eq!(boosted.combined[11], strong[11]);
}

#[test]
fn fits_are_reproducible() {
    let ds = dataset().impute_same_month_mean().unwrap();
    let d = build_design_matrix(&ds, &DesignConfig::default()).unwrap();
    for kind in [ModelKind::Rf, ModelKind::Gbt, ModelKind::Svr] {
        let hp = default_hyperparams(kind);
        let a = fit(kind, &d.features, &d.target, &hp, 9).unwrap();
        let b = fit(kind, &d.features, &d.target, &hp, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            forecast_holdout(&a, &d.spec, &ds, 6).unwrap(),
            forecast_holdout(&b, &d.spec, &ds, 6).unwrap()
        );
    }
}
