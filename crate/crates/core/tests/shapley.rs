//! Attribution properties on fitted tree ensembles.

use wsbf_core::learners::{default_hyperparams, fit, ModelKind, Regressor};
use wsbf_core::data::FeatureTable;
use wsbf_core::linalg::Matrix;
use wsbf_core::shapley::{exact_shapley, exhaustive_shapley, explain, sampled_shapley, ShapleyMethod};

fn table(n: usize) -> (FeatureTable, Vec<f64>) {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| vec![(i % 7) as f64, ((i * 3) % 5) as f64, ((i * 11) % 13) as f64, (i % 2) as f64])
        .collect();
    let y = rows.iter().map(|r| 10.0 * r[0] + 3.0 * r[1] * r[3] + 0.0 * r[2]).collect();
    let names = ["a", "b", "noise", "flag"].iter().map(|s| s.to_string()).collect();
    (FeatureTable::new(names, Matrix::from_rows(&rows).unwrap()).unwrap(), y)
}

#[test]
fn tree_attributions_are_efficient_and_consistent() {
    let (x, y) = table(60);
    let bg = x.values.select_rows(&(0..15).collect::<Vec<_>>());
    for kind in [ModelKind::Rf, ModelKind::Gbt] {
        let m = fit(kind, &x, &y, &default_hyperparams(kind), 5).unwrap();
        let rep = explain(&m, &x.values.select_rows(&[20, 21, 22]), &bg, ShapleyMethod::Exact).unwrap();
        for (phi, p) in rep.phi.iter().zip(&rep.predictions) {
            assert!((rep.base_value + phi.iter().sum::<f64>() - p).abs() < 1e-6);
        }
        let row = x.values.row(30);
        let exact = exact_shapley(&m, row, &bg).unwrap();
        let brute = exhaustive_shapley(&m, row, &bg).unwrap();
        for (a, b) in exact.iter().zip(&brute) {
            assert!((a - b).abs() < 1e-8);
        }
        let (s, se) = sampled_shapley(&m, row, &bg, 400, 3).unwrap();
        for j in 0..4 {
            assert!((s[j] - exact[j]).abs() <= 4.0 * se[j] + 1e-9, "{kind} feature {j}");
        }
        assert_eq!(m.feature_names().len(), 4);
    }
}
