//! Squared-error gradient boosting with L1/L2-regularized leaf weights.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tree::{grow, stable_mean, RegressionTree, TreeParams};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Shrinkage applied to every tree unless overridden.
pub const DEFAULT_LEARNING_RATE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoosting {
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
}

impl GradientBoosting {
    /// Base score is the training mean. Each round fits a tree to
    /// `g = pred - y`, `h = 1` and adds `learning_rate * leaf weight`.
    pub fn fit(x: &Matrix, y: &[f64], p: &GbtParams) -> Result<Self> {
        let n = x.rows();
        if n == 0 || y.len() != n {
            return Err(Error::EmptyInput("boosting needs aligned, non-empty data"));
        }
        if p.lambda < 0.0 || p.alpha < 0.0 {
            return Err(Error::Hyperparam {
                name: "lambda/alpha".into(),
                message: "regularization must be non-negative".into(),
            });
        }
        let base_score = stable_mean(y.iter().copied());
        let tp = TreeParams {
            max_depth: p.max_depth,
            min_samples_split: 2,
            min_samples_leaf: 1,
            lambda: p.lambda,
            alpha: p.alpha,
        };
        let rows: Vec<usize> = (0..n).collect();
        let hess = vec![1.0; n];
        let mut pred = vec![base_score; n];
        let mut trees = Vec::with_capacity(p.n_estimators);
        for _ in 0..p.n_estimators {
            let grad: Vec<f64> = pred.iter().zip(y).map(|(f, t)| f - t).collect();
            let tree = grow(x, &grad, &hess, &rows, 0.0, &tp);
            for (i, r) in x.iter_rows().enumerate() {
                pred[i] += p.learning_rate * tree.predict_row(r);
            }
            trees.push(tree);
        }
        Ok(Self {
            base_score,
            learning_rate: p.learning_rate,
            trees,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.trees
            .iter()
            .fold(self.base_score, |acc, t| acc + self.learning_rate * t.predict_row(row))
    }
}
