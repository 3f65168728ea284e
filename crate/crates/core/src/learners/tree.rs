//! Regression trees grown from gradient statistics.
//!
//! A node holding gradient sum `G` and hessian sum `H` scores
//! `T(G)^2 / (H + lambda)` with `T` the soft-threshold at `alpha`; its leaf
//! weight is `-T(G) / (H + lambda)`. With `g_i = -y_i`, `h_i = 1` and no
//! regularization this is exactly CART with variance reduction, so random
//! forests and boosting share one grower.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub lambda: f64,
    pub alpha: f64,
}

impl TreeParams {
    pub fn cart(max_depth: usize, min_samples_split: usize, min_samples_leaf: usize) -> Self {
        Self {
            max_depth,
            min_samples_split,
            min_samples_leaf,
            lambda: 0.0,
            alpha: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes in creation order; node 0 is the root. Prediction is
/// `offset + leaf value`, with `x[feature] <= threshold` going left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub offset: f64,
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return self.offset + value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &RegressionTree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }

    /// Features used by at least one split.
    pub fn split_features(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .collect();
        f.sort_unstable();
        f.dedup();
        f
    }
}

/// Mean that is exact when all values are equal.
pub fn stable_mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut it = values.into_iter();
    let Some(first) = it.next() else {
        return 0.0;
    };
    let (mut acc, mut n) = (0.0, 1usize);
    for v in it {
        acc += v - first;
        n += 1;
    }
    first + acc / n as f64
}

pub fn soft_threshold(g: f64, alpha: f64) -> f64 {
    if g > alpha {
        g - alpha
    } else if g < -alpha {
        g + alpha
    } else {
        0.0
    }
}

pub fn leaf_weight(g: f64, h: f64, p: &TreeParams) -> f64 {
    let denom = h + p.lambda;
    if denom <= 0.0 {
        return 0.0;
    }
    -soft_threshold(g, p.alpha) / denom
}

pub fn node_score(g: f64, h: f64, p: &TreeParams) -> f64 {
    let denom = h + p.lambda;
    if denom <= 0.0 {
        return 0.0;
    }
    let t = soft_threshold(g, p.alpha);
    t * t / denom
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Best split of `rows` by exhaustive search. Features are scanned in index
/// order and thresholds ascending; a later candidate must beat the incumbent
/// by more than a relative tolerance, so ties resolve to the lowest feature
/// then the lowest threshold.
pub fn best_split(
    x: &Matrix,
    grad: &[f64],
    hess: &[f64],
    rows: &[usize],
    p: &TreeParams,
) -> Option<SplitChoice> {
    let g_total: f64 = rows.iter().map(|&i| grad[i]).sum();
    let h_total: f64 = rows.iter().map(|&i| hess[i]).sum();
    let parent = node_score(g_total, h_total, p);
    let scale: f64 = rows.iter().map(|&i| grad[i] * grad[i]).sum::<f64>().max(1.0);
    let min_gain = 1e-12 * scale;
    let n = rows.len();
    if n < 2 {
        return None;
    }
    let mut best: Option<SplitChoice> = None;
    let mut order: Vec<usize> = rows.to_vec();
    for f in 0..x.cols() {
        order.sort_by(|&a, &b| x[(a, f)].total_cmp(&x[(b, f)]));
        let (mut gl, mut hl) = (0.0, 0.0);
        for k in 0..n - 1 {
            let r = order[k];
            gl += grad[r];
            hl += hess[r];
            let (lo, hi) = (x[(r, f)], x[(order[k + 1], f)]);
            if lo >= hi || k + 1 < p.min_samples_leaf || n - k - 1 < p.min_samples_leaf {
                continue;
            }
            let gain = node_score(gl, hl, p) + node_score(g_total - gl, h_total - hl, p) - parent;
            let beats = match best {
                None => gain > min_gain,
                Some(b) => gain > b.gain + 1e-12 * b.gain.abs().max(scale),
            };
            if beats {
                let mut threshold = 0.5 * (lo + hi);
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some(SplitChoice {
                    feature: f,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

/// Grows a tree over `rows` (duplicates allowed, as in bootstrap samples).
pub fn grow(
    x: &Matrix,
    grad: &[f64],
    hess: &[f64],
    rows: &[usize],
    offset: f64,
    p: &TreeParams,
) -> RegressionTree {
    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, rows.to_vec(), 0)];
    while let Some((id, idx, depth)) = stack.pop() {
        let g: f64 = idx.iter().map(|&i| grad[i]).sum();
        let h: f64 = idx.iter().map(|&i| hess[i]).sum();
        let can_split = depth < p.max_depth && idx.len() >= p.min_samples_split.max(2);
        let choice = if can_split {
            best_split(x, grad, hess, &idx, p)
        } else {
            None
        };
        match choice {
            None => nodes[id] = Node::Leaf { value: leaf_weight(g, h, p) },
            Some(c) => {
                let (l, r): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| x[(i, c.feature)] <= c.threshold);
                let (left, right) = (nodes.len(), nodes.len() + 1);
                nodes.push(Node::Leaf { value: 0.0 });
                nodes.push(Node::Leaf { value: 0.0 });
                nodes[id] = Node::Split {
                    feature: c.feature,
                    threshold: c.threshold,
                    left,
                    right,
                };
                stack.push((right, r, depth + 1));
                stack.push((left, l, depth + 1));
            }
        }
    }
    RegressionTree { offset, nodes }
}

/// Plain CART on targets `y`: leaves hold the mean target.
pub fn fit_cart(x: &Matrix, y: &[f64], rows: &[usize], p: &TreeParams) -> RegressionTree {
    let offset = stable_mean(rows.iter().map(|&i| y[i]));
    let grad: Vec<f64> = y.iter().map(|v| -(v - offset)).collect();
    let hess = vec![1.0; y.len()];
    let cart = TreeParams::cart(p.max_depth, p.min_samples_split, p.min_samples_leaf);
    grow(x, &grad, &hess, rows, offset, &cart)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_data() -> (Matrix, Vec<f64>) {
        let rows: Vec<[f64; 1]> = (0..10).map(|i| [i as f64]).collect();
        let y = (0..10).map(|i| if i < 5 { 0.0 } else { 10.0 }).collect();
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn cart_memorizes_step() {
        let (x, y) = step_data();
        let rows: Vec<usize> = (0..10).collect();
        let t = fit_cart(&x, &y, &rows, &TreeParams::cart(usize::MAX, 2, 1));
        for (r, &want) in x.iter_rows().zip(&y) {
            assert_eq!(t.predict_row(r), want);
        }
        assert_eq!(t.depth(), 1);
        assert!(matches!(t.nodes[0], Node::Split { threshold, .. } if threshold == 4.5));
    }

    #[test]
    fn ties_choose_lowest_feature() {
        // Two identical columns: the split must use column 0.
        let rows: Vec<[f64; 2]> = (0..6).map(|i| [i as f64, i as f64]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let y = [1.0, 1.0, 1.0, 5.0, 5.0, 5.0];
        let t = fit_cart(&x, &y, &[0, 1, 2, 3, 4, 5], &TreeParams::cart(1, 2, 1));
        assert_eq!(t.split_features(), vec![0]);
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(5.0, 2.0), 3.0);
        assert_eq!(soft_threshold(-5.0, 2.0), -3.0);
        assert_eq!(soft_threshold(1.5, 2.0), 0.0);
    }

    #[test]
    fn min_leaf_blocks_split() {
        let (x, y) = step_data();
        let rows: Vec<usize> = (0..10).collect();
        let t = fit_cart(&x, &y, &rows, &TreeParams::cart(10, 2, 6));
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_row(&[0.0]), 5.0);
    }
}
