//! Genetic algorithm and particle swarm search over mixed hyperparameter
//! spaces.
//!
//! Both engines evaluate candidates in waves of one population. A wave is
//! handed to a [`WaveEvaluator`], which may run it concurrently; results come
//! back in candidate order, so serial and parallel runs are identical.

pub mod campaign;
pub mod cv;
pub mod ga;
pub mod pso;
pub mod space;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::learners::Hyperparams;

pub use campaign::{multi_seed_campaign, CampaignResult, Optimizer};
pub use cv::{cv_fold_maes, CvObjective};
pub use ga::{ga_optimize, GaConfig};
pub use pso::{pso_optimize, PsoConfig};
pub use space::{Dimension, Domain, SearchSpace};

/// Fitness to minimize. `eval_id` numbers evaluations within a run from 0
/// and lets objectives derive per-candidate seeds.
pub trait Objective: Sync {
    fn evaluate(&self, hp: &Hyperparams, eval_id: u64) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&Hyperparams, u64) -> f64 + Sync,
{
    fn evaluate(&self, hp: &Hyperparams, eval_id: u64) -> f64 {
        self(hp, eval_id)
    }
}

pub trait WaveEvaluator {
    /// Fitness of each `(eval_id, candidate)` in input order.
    fn evaluate_wave(&self, objective: &dyn Objective, wave: &[(u64, Hyperparams)]) -> Vec<f64>;
}

/// Evaluates one candidate after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl WaveEvaluator for Serial {
    fn evaluate_wave(&self, objective: &dyn Objective, wave: &[(u64, Hyperparams)]) -> Vec<f64> {
        wave.iter().map(|(id, hp)| objective.evaluate(hp, *id)).collect()
    }
}

/// NaN fitness counts as the worst possible value.
pub(crate) fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub hyperparams: Hyperparams,
    /// Mean fold MAE in kWh once evaluated.
    pub fitness: Option<f64>,
    pub eval_id: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub eval_id: u64,
    pub iteration: usize,
    pub hyperparams: Hyperparams,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessTrace {
    pub optimizer: String,
    pub seed: u64,
    /// Lowest fitness seen up to and including each iteration.
    pub best_so_far: Vec<f64>,
    /// Lowest fitness in the population at each iteration.
    pub iteration_best: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best: Candidate,
    pub trace: FitnessTrace,
    pub log: Vec<EvaluationRecord>,
}

/// `a` beats `b` if strictly fitter, or equally fit and evaluated earlier.
pub(crate) fn beats(a: (f64, u64), b: (f64, u64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}
