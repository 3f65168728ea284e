use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{beats, sanitize, Candidate, EvaluationRecord, FitnessTrace, Objective, OptimizationResult, SearchSpace, WaveEvaluator};
use crate::learners::Hyperparams;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub particles: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Initial velocities are uniform in `+-velocity_scale * (hi - lo)`.
    pub velocity_scale: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            particles: 30,
            iterations: 25,
            inertia: 0.9,
            cognitive: 0.5,
            social: 0.3,
            velocity_scale: 0.1,
        }
    }
}

/// Global-best PSO on the continuous relaxation of `space`. Positions are
/// clamped to the relaxed bounds and snapped to the domain only when
/// evaluated.
pub fn pso_optimize(
    objective: &dyn Objective,
    space: &SearchSpace,
    cfg: &PsoConfig,
    seed: u64,
    evaluator: &dyn WaveEvaluator,
) -> OptimizationResult {
    assert!(cfg.particles > 0 && cfg.iterations > 0, "empty PSO budget");
    let mut r = rng::rng_from(rng::derive_named(seed, "pso"));
    let bounds: Vec<(f64, f64)> = space.dims.iter().map(|d| d.domain.relaxed_bounds()).collect();
    let dim = bounds.len();
    let mut pos: Vec<Vec<f64>> = (0..cfg.particles)
        .map(|_| bounds.iter().map(|&(lo, hi)| if lo == hi { lo } else { r.random_range(lo..=hi) }).collect())
        .collect();
    let mut vel: Vec<Vec<f64>> = (0..cfg.particles)
        .map(|_| {
            bounds
                .iter()
                .map(|&(lo, hi)| {
                    let s = cfg.velocity_scale * (hi - lo);
                    if s > 0.0 {
                        r.random_range(-s..=s)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();

    let mut log = Vec::new();
    let mut trace = FitnessTrace {
        optimizer: String::from("pso"),
        seed,
        best_so_far: Vec::new(),
        iteration_best: Vec::new(),
        evaluations: 0,
    };
    let mut pbest: Vec<(Vec<f64>, f64, u64)> = Vec::new();
    let mut gbest: Option<(Vec<f64>, Hyperparams, f64, u64)> = None;
    let mut next_id = 0u64;

    for iteration in 1..=cfg.iterations {
        if iteration > 1 {
            let g = &gbest.as_ref().expect("set after first wave").0;
            for p in 0..cfg.particles {
                for k in 0..dim {
                    let (r1, r2): (f64, f64) = (r.random(), r.random());
                    vel[p][k] = cfg.inertia * vel[p][k]
                        + cfg.cognitive * r1 * (pbest[p].0[k] - pos[p][k])
                        + cfg.social * r2 * (g[k] - pos[p][k]);
                    pos[p][k] = (pos[p][k] + vel[p][k]).clamp(bounds[k].0, bounds[k].1);
                }
            }
        }
        let wave: Vec<(u64, Hyperparams)> = pos
            .iter()
            .map(|x| {
                next_id += 1;
                (next_id - 1, space.decode(x))
            })
            .collect();
        let fit: Vec<f64> = evaluator.evaluate_wave(objective, &wave).into_iter().map(sanitize).collect();
        let mut it_best = (f64::INFINITY, u64::MAX);
        for (p, ((id, hp), &f)) in wave.into_iter().zip(&fit).enumerate() {
            log.push(EvaluationRecord {
                eval_id: id,
                iteration,
                hyperparams: hp.clone(),
                fitness: f,
            });
            if beats((f, id), it_best) {
                it_best = (f, id);
            }
            if iteration == 1 {
                pbest.push((pos[p].clone(), f, id));
            } else if beats((f, id), (pbest[p].1, pbest[p].2)) {
                pbest[p] = (pos[p].clone(), f, id);
            }
            if gbest.as_ref().is_none_or(|g| beats((f, id), (g.2, g.3))) {
                gbest = Some((pos[p].clone(), hp, f, id));
            }
        }
        trace.iteration_best.push(it_best.0);
        trace.best_so_far.push(gbest.as_ref().expect("non-empty swarm").2);
    }

    trace.evaluations = log.len();
    let (_, hp, f, id) = gbest.expect("non-empty swarm");
    OptimizationResult {
        best: Candidate {
            hyperparams: hp,
            fitness: Some(f),
            eval_id: id,
        },
        trace,
        log,
    }
}
