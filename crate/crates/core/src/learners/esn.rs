//! Echo state network with a ridge readout.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ridge, spectral_radius, Matrix};
use crate::rng::{self, Rng};

pub const READOUT_RIDGE: f64 = 1e-6;
pub const MAX_RESERVOIR_RETRIES: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsnParams {
    pub reservoirs: usize,
    /// Probability that a reservoir connection is kept.
    pub sparsity: f64,
    pub spectral_radius: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Esn {
    pub w: Matrix,
    pub w_in: Matrix,
    /// Readout over the extended state `[1, u, x]`.
    pub w_out: Vec<f64>,
    /// Reservoir state after the last training row; prediction resumes here.
    pub last_state: Vec<f64>,
}

/// Sparse reservoir with entries in `[-0.5, 0.5]`, rescaled to the target
/// spectral radius. Reservoirs with zero radius are redrawn from
/// `derive(seed, [attempt])`.
pub fn build_reservoir(n: usize, sparsity: f64, radius: f64, seed: u64) -> Result<Matrix> {
    for attempt in 0..=MAX_RESERVOIR_RETRIES {
        let s = if attempt == 0 { seed } else { rng::derive(seed, &[attempt as u64]) };
        let mut r = rng::rng_from(s);
        let mut w = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let keep = r.random::<f64>() < sparsity;
                let v = r.random_range(-0.5..0.5);
                if keep {
                    w[(i, j)] = v;
                }
            }
        }
        let rho = spectral_radius(&w)?;
        if rho > 1e-12 {
            w.scale(radius / rho);
            return Ok(w);
        }
    }
    Err(Error::DegenerateReservoir(MAX_RESERVOIR_RETRIES + 1))
}

impl Esn {
    pub fn fit(x: &Matrix, z: &[f64], p: &EsnParams, seed: u64) -> Result<Self> {
        let n = x.rows();
        if n == 0 || z.len() != n {
            return Err(Error::EmptyInput("ESN needs aligned, non-empty data"));
        }
        if p.reservoirs == 0 {
            return Err(Error::Hyperparam {
                name: "reservoirs".into(),
                message: "must be at least 1".into(),
            });
        }
        let w = build_reservoir(p.reservoirs, p.sparsity, p.spectral_radius, rng::derive_named(seed, "reservoir"))?;
        let mut r = rng::rng_from(rng::derive_named(seed, "input"));
        let mut w_in = Matrix::zeros(p.reservoirs, x.cols());
        for i in 0..p.reservoirs {
            for j in 0..x.cols() {
                w_in[(i, j)] = r.random_range(-1.0..1.0);
            }
        }
        let mut esn = Self {
            w,
            w_in,
            w_out: Vec::new(),
            last_state: vec![0.0; p.reservoirs],
        };
        let mut noise = rng::rng_from(rng::derive_named(seed, "noise"));
        let states = esn.harvest(x, p.noise, &mut noise);
        esn.last_state = states.row(n - 1)[1 + x.cols()..].to_vec();
        esn.w_out = ridge(&states, z, READOUT_RIDGE)?;
        Ok(esn)
    }

    /// Extended states `[1, u_t, x_t]` driven from a zero state.
    pub fn harvest(&self, x: &Matrix, noise: f64, r: &mut Rng) -> Matrix {
        let n_res = self.w.rows();
        let mut state = vec![0.0; n_res];
        let mut out = Matrix::zeros(0, 1 + x.cols() + n_res);
        for u in x.iter_rows() {
            self.update(&mut state, u);
            if noise != 0.0 {
                for s in state.iter_mut() {
                    *s += noise * (r.random::<f64>() - 0.5);
                }
            }
            out.push_row(&extended(u, &state)).expect("fixed width");
        }
        out
    }

    fn update(&self, state: &mut [f64], u: &[f64]) {
        let mut pre = self.w.matvec(state);
        for (p, a) in pre.iter_mut().zip(self.w_in.matvec(u)) {
            *p += a;
        }
        for (s, p) in state.iter_mut().zip(pre) {
            *s = p.tanh();
        }
    }

    /// Drives the reservoir through `x` in row order, starting from the last
    /// training state without noise.
    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        let mut state = self.last_state.clone();
        x.iter_rows()
            .map(|u| {
                self.update(&mut state, u);
                extended(u, &state).iter().zip(&self.w_out).map(|(a, b)| a * b).sum()
            })
            .collect()
    }
}

fn extended(u: &[f64], state: &[f64]) -> Vec<f64> {
    let mut e = Vec::with_capacity(1 + u.len() + state.len());
    e.push(1.0);
    e.extend_from_slice(u);
    e.extend_from_slice(state);
    e
}
