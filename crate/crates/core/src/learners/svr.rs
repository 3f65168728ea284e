//! Epsilon-insensitive support vector regression.
//!
//! The dual is solved in the LIBSVM form: `2n` box-constrained variables
//! `a = [a+; a-]`, labels `s = [+1; -1]`, linear term
//! `p = [eps - z; eps + z]`, and one equality constraint `s'a = 0`. Working
//! pairs are chosen by second-order maximal violation and the loop stops once
//! the maximal KKT gap falls below the tolerance.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

pub const KKT_TOLERANCE: f64 = 1e-3;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Poly,
    Rbf,
    Sigmoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub kind: KernelKind,
    pub gamma: f64,
    pub degree: i32,
    pub coef0: f64,
}

impl Kernel {
    /// `gamma = 1 / (n_features * Var(X))` over all entries of `x`, degree 3
    /// and `coef0 = 0`.
    pub fn with_scale_gamma(kind: KernelKind, x: &Matrix) -> Self {
        let v = x.as_slice();
        let var = if v.is_empty() {
            0.0
        } else {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / v.len() as f64
        };
        let denom = x.cols() as f64 * var;
        Self {
            kind,
            gamma: if denom > 0.0 { 1.0 / denom } else { 1.0 },
            degree: 3,
            coef0: 0.0,
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Rbf => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-self.gamma * d2).exp()
            }
            KernelKind::Poly => (self.gamma * dot(a, b) + self.coef0).powi(self.degree),
            KernelKind::Sigmoid => (self.gamma * dot(a, b) + self.coef0).tanh(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub kernel: KernelKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Svr {
    pub kernel: Kernel,
    pub support: Matrix,
    /// Training row of each support vector.
    pub support_index: Vec<usize>,
    /// `a+ - a-` for each support row.
    pub coef: Vec<f64>,
    pub rho: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl Svr {
    pub fn fit(x: &Matrix, z: &[f64], p: &SvrParams) -> Result<Self> {
        let n = x.rows();
        if n == 0 || z.len() != n {
            return Err(Error::EmptyInput("SVR needs aligned, non-empty data"));
        }
        if !(p.c > 0.0) || !(p.epsilon >= 0.0) {
            return Err(Error::Hyperparam {
                name: "C/epsilon".into(),
                message: "C must be positive and epsilon non-negative".into(),
            });
        }
        let kernel = Kernel::with_scale_gamma(p.kernel, x);
        let k = gram(&kernel, x);
        let sol = solve(&k, z, p.c, p.epsilon);
        let mut rows = Vec::new();
        let mut coef = Vec::new();
        for i in 0..n {
            let c = sol.alpha[i] - sol.alpha[i + n];
            if c != 0.0 {
                rows.push(i);
                coef.push(c);
            }
        }
        Ok(Self {
            kernel,
            support: if rows.is_empty() {
                Matrix::zeros(0, x.cols())
            } else {
                x.select_rows(&rows)
            },
            support_index: rows,
            coef,
            rho: sol.rho,
            converged: sol.converged,
            iterations: sol.iterations,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.support
            .iter_rows()
            .zip(&self.coef)
            .map(|(s, c)| c * self.kernel.eval(s, row))
            .sum::<f64>()
            - self.rho
    }
}

/// Largest KKT violation per training point, in target units, for a model
/// fitted on `(x, z)` with the given `C` and `epsilon`.
///
/// With residual `r = z - f(x)`: `a+ = 0` needs `r <= eps`, `a+ = C` needs
/// `r >= eps`, and an interior `a+` needs `r = eps`; `a-` mirrors this at
/// `-eps`.
pub fn kkt_violations(model: &Svr, x: &Matrix, z: &[f64], c: f64, epsilon: f64) -> Vec<f64> {
    let mut beta = vec![0.0; x.rows()];
    for (&i, &c) in model.support_index.iter().zip(&model.coef) {
        beta[i] = c;
    }
    let bound_tol = 1e-12 * c.max(1.0);
    x.iter_rows()
        .zip(z)
        .zip(beta)
        .map(|((row, &t), beta)| {
            let r = t - model.predict_row(row);
            let (ap, am) = if beta > 0.0 { (beta, 0.0) } else { (0.0, -beta) };
            let side = |a: f64, target: f64, up: bool| -> f64 {
                // `up`: the variable is pushed by residuals above `target`.
                let d = if up { r - target } else { target - r };
                if a <= bound_tol {
                    d.max(0.0)
                } else if a >= c - bound_tol {
                    (-d).max(0.0)
                } else {
                    d.abs()
                }
            };
            side(ap, epsilon, true).max(side(am, -epsilon, false))
        })
        .collect()
}

fn gram(kernel: &Kernel, x: &Matrix) -> Matrix {
    let n = x.rows();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.eval(x.row(i), x.row(j));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

pub(crate) struct DualSolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// SMO on the `2n`-variable dual given a precomputed kernel matrix.
pub(crate) fn solve(k: &Matrix, z: &[f64], c: f64, eps: f64) -> DualSolution {
    let n = z.len();
    let l = 2 * n;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let kk = |a: usize, b: usize| k[(a % n, b % n)];
    // Q_ab = s_a s_b K_ab.
    let q = |a: usize, b: usize| sign(a) * sign(b) * kk(a, b);
    let mut alpha = vec![0.0; l];
    let mut grad: Vec<f64> = (0..l)
        .map(|t| if t < n { eps - z[t] } else { eps + z[t - n] })
        .collect();
    let max_iter = 100_000usize.max(100 * l);
    let is_upper = |a: f64| a >= c;
    let is_lower = |a: f64| a <= 0.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // Select i: maximal violator in I_up.
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..l {
            if sign(t) > 0.0 {
                if !is_upper(alpha[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i = t;
                }
            } else if !is_lower(alpha[t]) && grad[t] >= gmax {
                gmax = grad[t];
                i = t;
            }
        }
        // Select j by second-order gain among I_low.
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..l {
            let (gd, g2) = if sign(t) > 0.0 {
                if is_lower(alpha[t]) {
                    continue;
                }
                (gmax + grad[t], grad[t])
            } else {
                if is_upper(alpha[t]) {
                    continue;
                }
                (gmax - grad[t], -grad[t])
            };
            if g2 >= gmax2 {
                gmax2 = g2;
            }
            if i != usize::MAX && gd > 0.0 {
                let mut quad = kk(i, i) + kk(t, t) - 2.0 * sign(i) * q(i, t) * sign(t);
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(gd * gd) / quad;
                if obj <= best_obj {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if gmax + gmax2 < KKT_TOLERANCE || i == usize::MAX || j == usize::MAX {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = q(i, j);
        if sign(i) != sign(j) {
            let mut quad = kk(i, i) + kk(j, j) + 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = kk(i, i) + kk(j, j) - 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }

    // Bias: average of s*G over free variables, else the midpoint of the
    // feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..l {
        let yg = sign(t) * grad[t];
        let upper = is_upper(alpha[t]);
        let lower = is_lower(alpha[t]);
        if upper {
            if sign(t) < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower {
            if sign(t) > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };
    DualSolution {
        alpha,
        rho,
        converged,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth_1d(n: usize) -> (Matrix, Vec<f64>) {
        let rows: Vec<[f64; 1]> = (0..n).map(|i| [-1.5 + 3.0 * i as f64 / (n - 1) as f64]).collect();
        let z = rows.iter().map(|r| (2.0 * r[0]).sin()).collect();
        (Matrix::from_rows(&rows).unwrap(), z)
    }

    /// Dual objective `0.5 a'Qa + p'a`.
    fn dual_objective(k: &Matrix, z: &[f64], eps: f64, a: &[f64]) -> f64 {
        let n = z.len();
        let s = |t: usize| if t < n { 1.0 } else { -1.0 };
        let mut obj = 0.0;
        for u in 0..2 * n {
            obj += a[u] * if u < n { eps - z[u] } else { eps + z[u - n] };
            for v in 0..2 * n {
                obj += 0.5 * a[u] * a[v] * s(u) * s(v) * k[(u % n, v % n)];
            }
        }
        obj
    }

    /// Independent dense solve: augmented Lagrangian on the equality
    /// constraint, projected gradient on the box.
    fn oracle_dual(k: &Matrix, z: &[f64], c: f64, eps: f64) -> Vec<f64> {
        let n = z.len();
        let l = 2 * n;
        let s = |t: usize| if t < n { 1.0 } else { -1.0 };
        let mut a = vec![0.0; l];
        let (mut mu, rho) = (0.0, 10.0);
        let lip = (0..n).map(|i| (0..n).map(|j| k[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max) * 2.0 + rho * l as f64;
        let step = 1.0 / lip;
        for _ in 0..200 {
            for _ in 0..2000 {
                let eq: f64 = (0..l).map(|t| s(t) * a[t]).sum();
                let g: Vec<f64> = (0..l)
                    .map(|u| {
                        let qa: f64 = (0..l).map(|v| s(u) * s(v) * k[(u % n, v % n)] * a[v]).sum();
                        let p = if u < n { eps - z[u] } else { eps + z[u - n] };
                        qa + p + (mu + rho * eq) * s(u)
                    })
                    .collect();
                for u in 0..l {
                    a[u] = (a[u] - step * g[u]).clamp(0.0, c);
                }
            }
            let eq: f64 = (0..l).map(|t| s(t) * a[t]).sum();
            mu += rho * eq;
        }
        a
    }

    #[test]
    fn rbf_fit_tracks_dense_oracle() {
        let (x, z) = smooth_1d(15);
        let p = SvrParams {
            c: 100.0,
            epsilon: 0.02,
            kernel: KernelKind::Rbf,
        };
        let m = Svr::fit(&x, &z, &p).unwrap();
        assert!(m.converged);
        let kern = Kernel::with_scale_gamma(KernelKind::Rbf, &x);
        let k = gram(&kern, &x);
        let smo = solve(&k, &z, p.c, p.epsilon);
        let oracle = oracle_dual(&k, &z, p.c, p.epsilon);
        let (fs, fo) = (
            dual_objective(&k, &z, p.epsilon, &smo.alpha),
            dual_objective(&k, &z, p.epsilon, &oracle),
        );
        assert!((fs - fo).abs() <= 1e-3 * fo.abs().max(1.0), "smo {fs} oracle {fo}");
        let mae = x.iter_rows().zip(&z).map(|(r, t)| (m.predict_row(r) - t).abs()).sum::<f64>() / 15.0;
        assert!(mae <= 2.0 * p.epsilon, "mae {mae}");
    }

    #[test]
    fn every_point_satisfies_kkt() {
        for kind in [KernelKind::Rbf, KernelKind::Poly, KernelKind::Sigmoid] {
            let (x, z) = smooth_1d(25);
            let p = SvrParams {
                c: 5.0,
                epsilon: 0.1,
                kernel: kind,
            };
            let m = Svr::fit(&x, &z, &p).unwrap();
            assert!(m.converged);
            let worst = kkt_violations(&m, &x, &z, p.c, p.epsilon).into_iter().fold(0.0, f64::max);
            assert!(worst <= KKT_TOLERANCE, "{kind:?}: {worst}");
        }
    }

    #[test]
    fn constant_target_is_absorbed_by_bias() {
        let (x, _) = smooth_1d(10);
        let z = vec![4.0; 10];
        let m = Svr::fit(&x, &z, &SvrParams { c: 1.0, epsilon: 0.5, kernel: KernelKind::Rbf }).unwrap();
        assert!(m.coef.is_empty());
        for r in x.iter_rows() {
            assert!((m.predict_row(r) - 4.0).abs() <= 0.5);
        }
    }
}
