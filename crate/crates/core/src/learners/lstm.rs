//! Single-layer LSTM with a linear head, trained by BPTT and Adam.
//!
//! Gates are ordered input, forget, cell candidate, output. The configured
//! activation is used for the candidate and for the cell output; gates use
//! the logistic sigmoid.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;

pub const LEARNING_RATE: f64 = 1e-3;
const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Linear,
    Mish,
    Sigmoid,
    Softmax,
    Softplus,
    Softsign,
    Tanh,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

impl Activation {
    pub const ALL: [Activation; 7] = [
        Activation::Linear,
        Activation::Mish,
        Activation::Sigmoid,
        Activation::Softmax,
        Activation::Softplus,
        Activation::Softsign,
        Activation::Tanh,
    ];

    pub fn apply(self, x: &[f64]) -> Vec<f64> {
        match self {
            Activation::Softmax => {
                let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|v| v / s).collect()
            }
            _ => x.iter().map(|&v| self.scalar(v)).collect(),
        }
    }

    fn scalar(self, x: f64) -> f64 {
        match self {
            Activation::Linear => x,
            Activation::Mish => x * softplus(x).tanh(),
            Activation::Sigmoid => sigmoid(x),
            Activation::Softplus => softplus(x),
            Activation::Softsign => x / (1.0 + x.abs()),
            Activation::Tanh => x.tanh(),
            Activation::Softmax => unreachable!("softmax is not elementwise"),
        }
    }

    /// Gradient with respect to the input `x`, given output `y` and upstream
    /// gradient `dy`.
    pub fn backward(self, x: &[f64], y: &[f64], dy: &[f64]) -> Vec<f64> {
        match self {
            Activation::Softmax => {
                let s: f64 = dy.iter().zip(y).map(|(a, b)| a * b).sum();
                y.iter().zip(dy).map(|(yi, di)| yi * (di - s)).collect()
            }
            _ => x
                .iter()
                .zip(y)
                .zip(dy)
                .map(|((&xi, &yi), &di)| di * self.derivative(xi, yi))
                .collect(),
        }
    }

    fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Activation::Linear => 1.0,
            Activation::Mish => {
                let sp = softplus(x);
                let t = sp.tanh();
                t + x * (1.0 - t * t) * sigmoid(x)
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Softplus => sigmoid(x),
            Activation::Softsign => {
                let d = 1.0 + x.abs();
                1.0 / (d * d)
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Softmax => unreachable!("softmax is not elementwise"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub units: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub activation: Activation,
    pub bias: bool,
}

/// Flat parameter vector: input kernel `W` (4u x d), recurrent kernel
/// `U` (4u x u), gate bias (4u), head weights (u), head bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lstm {
    pub inputs: usize,
    pub units: usize,
    pub activation: Activation,
    pub bias: bool,
    pub params: Vec<f64>,
    /// Mean training loss per epoch, in scaled-target units.
    pub loss_history: Vec<f64>,
}

struct Offsets {
    w: usize,
    u: usize,
    b: usize,
    v: usize,
    c: usize,
    len: usize,
}

struct StepCache {
    x: Vec<f64>,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    zg: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    c: Vec<f64>,
    a: Vec<f64>,
}

impl Lstm {
    fn offsets(d: usize, u: usize) -> Offsets {
        let w = 0;
        let uu = w + 4 * u * d;
        let b = uu + 4 * u * u;
        let v = b + 4 * u;
        let c = v + u;
        Offsets {
            w,
            u: uu,
            b,
            v,
            c,
            len: c + 1,
        }
    }

    /// Glorot-uniform kernels, zero biases except a forget-gate bias of one.
    pub fn init(inputs: usize, p: &LstmParams, seed: u64) -> Self {
        let u = p.units;
        let o = Self::offsets(inputs, u);
        let mut r = rng::rng_from(seed);
        let mut params = vec![0.0; o.len];
        let lim_w = (6.0 / (inputs + 4 * u) as f64).sqrt();
        let lim_u = (6.0 / (u + 4 * u) as f64).sqrt();
        let lim_v = (6.0 / (u + 1) as f64).sqrt();
        for k in o.w..o.u {
            params[k] = r.random_range(-lim_w..=lim_w);
        }
        for k in o.u..o.b {
            params[k] = r.random_range(-lim_u..=lim_u);
        }
        if p.bias {
            for k in u..2 * u {
                params[o.b + k] = 1.0;
            }
        }
        for k in o.v..o.c {
            params[k] = r.random_range(-lim_v..=lim_v);
        }
        Self {
            inputs,
            units: u,
            activation: p.activation,
            bias: p.bias,
            params,
            loss_history: Vec::new(),
        }
    }

    /// Trains on rows of `x` as length-one sequences.
    pub fn fit(x: &Matrix, z: &[f64], p: &LstmParams, seed: u64) -> Result<Self> {
        let n = x.rows();
        if n == 0 || z.len() != n {
            return Err(Error::EmptyInput("LSTM needs aligned, non-empty data"));
        }
        if p.units == 0 || p.batch_size == 0 {
            return Err(Error::Hyperparam {
                name: "units/batch_size".into(),
                message: "must be at least 1".into(),
            });
        }
        let mut net = Self::init(x.cols(), p, rng::derive_named(seed, "init"));
        let mut shuffle = rng::rng_from(rng::derive_named(seed, "shuffle"));
        let mut adam = Adam::new(net.params.len());
        let mut order: Vec<usize> = (0..n).collect();
        let batch = p.batch_size.min(n);
        for epoch in 0..p.epochs {
            order.shuffle(&mut shuffle);
            let mut total = 0.0;
            for chunk in order.chunks(batch) {
                let mut grad = vec![0.0; net.params.len()];
                let mut loss = 0.0;
                for &i in chunk {
                    loss += net.accumulate(&[x.row(i)], z[i], chunk.len() as f64, &mut grad);
                }
                if !loss.is_finite() {
                    return Err(Error::Divergence(alloc::format!("non-finite LSTM loss in epoch {}", epoch + 1)));
                }
                total += loss;
                adam.step(&mut net.params, &grad);
            }
            net.loss_history.push(total / n as f64);
        }
        Ok(net)
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.predict_sequence(&[row])
    }

    pub fn predict_sequence(&self, xs: &[&[f64]]) -> f64 {
        let (caches, _) = self.forward(xs);
        let o = Self::offsets(self.inputs, self.units);
        let h = caches.last().map(|c| self.hidden(c)).unwrap_or_else(|| vec![0.0; self.units]);
        self.head(&o, &h)
    }

    fn head(&self, o: &Offsets, h: &[f64]) -> f64 {
        self.params[o.c] + self.params[o.v..o.c].iter().zip(h).map(|(a, b)| a * b).sum::<f64>()
    }

    fn hidden(&self, c: &StepCache) -> Vec<f64> {
        c.o.iter().zip(&c.a).map(|(o, a)| o * a).collect()
    }

    fn forward(&self, xs: &[&[f64]]) -> (Vec<StepCache>, Vec<f64>) {
        let (d, u) = (self.inputs, self.units);
        let o = Self::offsets(d, u);
        let p = &self.params;
        let mut h = vec![0.0; u];
        let mut c = vec![0.0; u];
        let mut caches = Vec::with_capacity(xs.len());
        for (t, x) in xs.iter().enumerate() {
            let mut z = vec![0.0; 4 * u];
            for (r, zr) in z.iter_mut().enumerate() {
                let w = &p[o.w + r * d..o.w + (r + 1) * d];
                let mut s: f64 = w.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                // The initial hidden state is zero, so the first step skips U.
                if t > 0 {
                    let ur = &p[o.u + r * u..o.u + (r + 1) * u];
                    s += ur.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>();
                }
                if self.bias {
                    s += p[o.b + r];
                }
                *zr = s;
            }
            let i: Vec<f64> = z[..u].iter().map(|&v| sigmoid(v)).collect();
            let f: Vec<f64> = z[u..2 * u].iter().map(|&v| sigmoid(v)).collect();
            let zg = z[2 * u..3 * u].to_vec();
            let g = self.activation.apply(&zg);
            let og: Vec<f64> = z[3 * u..].iter().map(|&v| sigmoid(v)).collect();
            let c_new: Vec<f64> = (0..u).map(|k| f[k] * c[k] + i[k] * g[k]).collect();
            let a = self.activation.apply(&c_new);
            let h_new: Vec<f64> = og.iter().zip(&a).map(|(o, a)| o * a).collect();
            caches.push(StepCache {
                x: x.to_vec(),
                h_prev: core::mem::replace(&mut h, h_new),
                c_prev: core::mem::replace(&mut c, c_new.clone()),
                i,
                f,
                zg,
                g,
                o: og,
                c: c_new,
                a,
            });
        }
        (caches, h)
    }

    /// Adds the gradient of `(yhat - target)^2 / batch` to `grad` and returns
    /// the unscaled squared error.
    fn accumulate(&self, xs: &[&[f64]], target: f64, batch: f64, grad: &mut [f64]) -> f64 {
        let (d, u) = (self.inputs, self.units);
        let o = Self::offsets(d, u);
        let p = &self.params;
        let (caches, h_last) = self.forward(xs);
        let yhat = self.head(&o, &h_last);
        let err = yhat - target;
        let dy = 2.0 * err / batch;
        for k in 0..u {
            grad[o.v + k] += dy * h_last[k];
        }
        grad[o.c] += dy;
        let mut dh: Vec<f64> = p[o.v..o.c].iter().map(|v| dy * v).collect();
        let mut dc = vec![0.0; u];
        for (t, s) in caches.iter().enumerate().rev() {
            let dout: Vec<f64> = dh.iter().zip(&s.a).map(|(a, b)| a * b).collect();
            let da: Vec<f64> = dh.iter().zip(&s.o).map(|(a, b)| a * b).collect();
            let dca = self.activation.backward(&s.c, &s.a, &da);
            for k in 0..u {
                dc[k] += dca[k];
            }
            let di: Vec<f64> = (0..u).map(|k| dc[k] * s.g[k]).collect();
            let dg: Vec<f64> = (0..u).map(|k| dc[k] * s.i[k]).collect();
            let df: Vec<f64> = (0..u).map(|k| dc[k] * s.c_prev[k]).collect();
            let dc_prev: Vec<f64> = (0..u).map(|k| dc[k] * s.f[k]).collect();
            let dzg = self.activation.backward(&s.zg, &s.g, &dg);
            let mut dz = vec![0.0; 4 * u];
            for k in 0..u {
                dz[k] = di[k] * s.i[k] * (1.0 - s.i[k]);
                dz[u + k] = df[k] * s.f[k] * (1.0 - s.f[k]);
                dz[2 * u + k] = dzg[k];
                dz[3 * u + k] = dout[k] * s.o[k] * (1.0 - s.o[k]);
            }
            let mut dh_prev = vec![0.0; u];
            for (r, &g) in dz.iter().enumerate() {
                if g == 0.0 {
                    continue;
                }
                for (j, xv) in s.x.iter().enumerate() {
                    grad[o.w + r * d + j] += g * xv;
                }
                if t > 0 {
                    for j in 0..u {
                        grad[o.u + r * u + j] += g * s.h_prev[j];
                        dh_prev[j] += g * p[o.u + r * u + j];
                    }
                }
                if self.bias {
                    grad[o.b + r] += g;
                }
            }
            dh = dh_prev;
            dc = dc_prev;
        }
        err * err
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let lr = LEARNING_RATE * (1.0 - BETA2.powi(self.t)).sqrt() / (1.0 - BETA1.powi(self.t));
        for k in 0..params.len() {
            self.m[k] = BETA1 * self.m[k] + (1.0 - BETA1) * grad[k];
            self.v[k] = BETA2 * self.v[k] + (1.0 - BETA2) * grad[k] * grad[k];
            params[k] -= lr * self.m[k] / (self.v[k].sqrt() + ADAM_EPS);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(units: usize, activation: Activation, bias: bool) -> LstmParams {
        LstmParams {
            units,
            epochs: 1,
            batch_size: 4,
            activation,
            bias,
        }
    }

    fn loss(net: &Lstm, xs: &[&[f64]], target: f64) -> f64 {
        let e = net.predict_sequence(xs) - target;
        e * e
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let seqs: [&[f64]; 3] = [&[0.3, -0.7], &[1.1, 0.2], &[-0.4, 0.9]];
        for act in Activation::ALL {
            for bias in [true, false] {
                let mut net = Lstm::init(2, &params(3, act, bias), 11);
                // Perturb biases so every parameter carries signal.
                for (k, v) in net.params.iter_mut().enumerate() {
                    *v += 0.01 * ((k * 7 % 5) as f64 - 2.0);
                }
                let target = 0.37;
                let mut grad = vec![0.0; net.params.len()];
                net.accumulate(&seqs, target, 1.0, &mut grad);
                let h = 1e-6;
                for k in 0..net.params.len() {
                    let trainable = bias || !(Lstm::offsets(2, 3).b..Lstm::offsets(2, 3).v).contains(&k);
                    let mut up = net.clone();
                    up.params[k] += h;
                    let mut dn = net.clone();
                    dn.params[k] -= h;
                    let fd = (loss(&up, &seqs, target) - loss(&dn, &seqs, target)) / (2.0 * h);
                    let want = if trainable { fd } else { 0.0 };
                    assert!(
                        (grad[k] - want).abs() <= 1e-6 * (1.0 + want.abs()),
                        "{act:?} bias={bias} param {k}: analytic {} numeric {fd}",
                        grad[k]
                    );
                }
            }
        }
    }

    #[test]
    fn tiny_network_gives_finite_predictions() {
        let x = Matrix::from_rows(&[[0.1, 0.2], [0.3, -0.1], [-0.5, 0.7]]).unwrap();
        let net = Lstm::fit(&x, &[0.5, -0.2, 0.1], &params(1, Activation::Tanh, true), 5).unwrap();
        assert_eq!(net.loss_history.len(), 1);
        assert!(x.iter_rows().all(|r| net.predict_row(r).is_finite()));
    }

    #[test]
    fn training_reduces_loss() {
        let rows: Vec<[f64; 3]> = (0..40)
            .map(|i| {
                let t = i as f64 / 10.0;
                [t.sin(), t.cos(), t - 2.0]
            })
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let z: Vec<f64> = rows.iter().map(|r| 0.8 * r[0] - 0.3 * r[2]).collect();
        let p = LstmParams {
            units: 8,
            epochs: 30,
            batch_size: 8,
            activation: Activation::Tanh,
            bias: true,
        };
        let net = Lstm::fit(&x, &z, &p, 1).unwrap();
        assert!(net.loss_history.last().unwrap() < &net.loss_history[0]);
        assert_eq!(net, Lstm::fit(&x, &z, &p, 1).unwrap());
    }

    #[test]
    fn softmax_jacobian() {
        let x = [0.2, -1.0, 0.5];
        let y = Activation::Softmax.apply(&x);
        let dy = [1.0, 0.0, -2.0];
        let dx = Activation::Softmax.backward(&x, &y, &dy);
        for k in 0..3 {
            let mut xp = x;
            xp[k] += 1e-6;
            let mut xm = x;
            xm[k] -= 1e-6;
            let f = |v: &[f64]| Activation::Softmax.apply(v).iter().zip(&dy).map(|(a, b)| a * b).sum::<f64>();
            assert!((dx[k] - (f(&xp) - f(&xm)) / 2e-6).abs() < 1e-8);
        }
    }
}
