//! Bootstrap-aggregated CART regression forest.

use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::tree::{fit_cart, stable_mean, RegressionTree, TreeParams};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<RegressionTree>,
}

impl RandomForest {
    /// Each tree sees a bootstrap resample of `x.rows()` rows drawn from the
    /// stream `derive(seed, [tree index])`. All features are candidates at
    /// every split.
    pub fn fit(x: &Matrix, y: &[f64], p: &ForestParams, seed: u64) -> Result<Self> {
        let n = x.rows();
        if n == 0 || y.len() != n {
            return Err(Error::EmptyInput("random forest needs aligned, non-empty data"));
        }
        if p.n_estimators == 0 {
            return Err(Error::Hyperparam {
                name: "n_estimators".into(),
                message: "must be at least 1".into(),
            });
        }
        let tp = TreeParams::cart(p.max_depth, p.min_samples_split, p.min_samples_leaf);
        let trees = (0..p.n_estimators)
            .map(|t| {
                let mut r = rng::rng_from(rng::derive(seed, &[t as u64]));
                let rows: Vec<usize> = (0..n).map(|_| r.random_range(0..n)).collect();
                fit_cart(x, y, &rows, &tp)
            })
            .collect();
        Ok(Self { trees })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        stable_mean(self.trees.iter().map(|t| t.predict_row(row)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn params(n: usize) -> ForestParams {
        ForestParams {
            n_estimators: n,
            max_depth: 300,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }

    #[test]
    fn constant_target_is_exact() {
        let x = Matrix::from_rows(&[[1.0, 3.0], [2.0, 1.0], [5.0, 4.0], [0.5, 9.0]]).unwrap();
        let y = vec![0.1; 4];
        let f = RandomForest::fit(&x, &y, &params(13), 3).unwrap();
        for r in x.iter_rows() {
            assert_eq!(f.predict_row(r), 0.1);
        }
    }

    #[test]
    fn prediction_is_mean_of_trees_and_deterministic() {
        let rows: Vec<[f64; 2]> = (0..30).map(|i| [i as f64, ((i * 7) % 11) as f64]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = (0..30).map(|i| (i as f64).sin() * 10.0 + i as f64).collect();
        let a = RandomForest::fit(&x, &y, &params(9), 42).unwrap();
        let b = RandomForest::fit(&x, &y, &params(9), 42).unwrap();
        assert_eq!(a, b);
        for r in x.iter_rows() {
            let by_tree: f64 = a.trees.iter().map(|t| t.predict_row(r)).sum::<f64>() / 9.0;
            assert!((a.predict_row(r) - by_tree).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_rows_gives_single_leaves() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0]]).unwrap();
        let p = ForestParams {
            min_samples_split: 10,
            ..params(3)
        };
        let f = RandomForest::fit(&x, &[1.0, 2.0, 3.0], &p, 0).unwrap();
        assert!(f.trees.iter().all(|t| t.nodes.len() == 1));
    }
}
