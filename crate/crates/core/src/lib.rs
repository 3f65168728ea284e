//! Algorithms for cooperative-ensemble forecasting of monthly electricity
//! consumption.
//!
//! The crate is `no_std` and needs only an allocator. File formats, the CLI
//! and thread-parallel evaluation live in the companion `wsbf` crate.
//!
//! Pipeline building blocks:
//!
//! - [`data`]: monthly series, same-month imputation, lagged design matrices.
//! - [`learners`]: random forest, gradient-boosted trees, epsilon-SVR, LSTM,
//!   echo state network and exponential-smoothing baselines.
//! - [`metaheuristics`]: genetic algorithm and particle swarm search over
//!   mixed hyperparameter spaces with a cross-validated MAE objective.
//! - [`shapley`]: interventional Shapley attribution and backward feature
//!   elimination.
//! - [`evaluation`]: splits, MAE/sMAPE, recursive forecasting and the
//!   stationarity/trend/seasonality diagnostics.
//! - [`wsb`]: the weaker separator booster ensemble.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod data;
pub mod error;
pub mod evaluation;
pub mod learners;
pub mod linalg;
pub mod metaheuristics;
pub mod rng;
pub mod shapley;
pub mod special;
pub mod stats;
pub mod wsb;

pub use error::{Error, Result};
