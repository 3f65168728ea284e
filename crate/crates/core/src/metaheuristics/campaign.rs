use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{
    beats, ga_optimize, pso_optimize, FitnessTrace, GaConfig, Objective, OptimizationResult, PsoConfig,
    SearchSpace, WaveEvaluator,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    Ga(GaConfig),
    Pso(PsoConfig),
}

impl Optimizer {
    pub fn tag(&self) -> &'static str {
        match self {
            Optimizer::Ga(_) => "ga",
            Optimizer::Pso(_) => "pso",
        }
    }

    pub fn run(
        &self,
        objective: &dyn Objective,
        space: &SearchSpace,
        seed: u64,
        evaluator: &dyn WaveEvaluator,
    ) -> OptimizationResult {
        match self {
            Optimizer::Ga(c) => ga_optimize(objective, space, c, seed, evaluator),
            Optimizer::Pso(c) => pso_optimize(objective, space, c, seed, evaluator),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    /// Per-iteration mean of best-so-far fitness across seeds.
    pub mean_best_so_far: Vec<f64>,
    pub runs: Vec<OptimizationResult>,
    /// Index into `runs` of the overall winner; earlier seeds win ties.
    pub best_run: usize,
}

impl CampaignResult {
    pub fn traces(&self) -> impl Iterator<Item = &FitnessTrace> {
        self.runs.iter().map(|r| &r.trace)
    }

    pub fn best(&self) -> &OptimizationResult {
        &self.runs[self.best_run]
    }
}

/// Runs `optimizer` once per seed, in seed-list order.
///
/// # Panics
/// If `seeds` is empty.
pub fn multi_seed_campaign(
    optimizer: &Optimizer,
    objective: &dyn Objective,
    space: &SearchSpace,
    seeds: &[u64],
    evaluator: &dyn WaveEvaluator,
) -> CampaignResult {
    assert!(!seeds.is_empty(), "campaign needs at least one seed");
    let runs: Vec<OptimizationResult> = seeds
        .iter()
        .map(|&s| optimizer.run(objective, space, s, evaluator))
        .collect();
    let iters = runs[0].trace.best_so_far.len();
    let mean_best_so_far = (0..iters)
        .map(|i| runs.iter().map(|r| r.trace.best_so_far[i]).sum::<f64>() / runs.len() as f64)
        .collect();
    let mut best_run = 0;
    for (i, r) in runs.iter().enumerate() {
        let f = r.best.fitness.unwrap_or(f64::INFINITY);
        let b = runs[best_run].best.fitness.unwrap_or(f64::INFINITY);
        // Seed order, not eval id, decides ties across runs.
        if beats((f, i as u64), (b, best_run as u64)) {
            best_run = i;
        }
    }
    CampaignResult {
        mean_best_so_far,
        runs,
        best_run,
    }
}
