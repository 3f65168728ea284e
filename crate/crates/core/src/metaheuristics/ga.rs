use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{
    beats, sanitize, Candidate, EvaluationRecord, FitnessTrace, Objective, OptimizationResult, SearchSpace,
    WaveEvaluator,
};
use crate::learners::Hyperparams;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub iterations: usize,
    /// Probability that an offspring has one gene resampled.
    pub mutation_rate: f64,
    pub tournament: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 30,
            iterations: 25,
            mutation_rate: 0.5,
            tournament: 3,
        }
    }
}

#[derive(Clone)]
struct Member {
    hp: Hyperparams,
    fitness: f64,
    id: u64,
}

fn tournament<'a>(pop: &'a [Member], size: usize, r: &mut Rng) -> &'a Member {
    let mut best = &pop[r.random_range(0..pop.len())];
    for _ in 1..size {
        let c = &pop[r.random_range(0..pop.len())];
        if beats((c.fitness, c.id), (best.fitness, best.id)) {
            best = c;
        }
    }
    best
}

/// Generational GA. Iteration 1 evaluates a uniform random population; each
/// later iteration breeds `population` offspring by tournament selection,
/// uniform crossover and single-gene mutation, then copies the best
/// individual so far over the worst offspring.
pub fn ga_optimize(
    objective: &dyn Objective,
    space: &SearchSpace,
    cfg: &GaConfig,
    seed: u64,
    evaluator: &dyn WaveEvaluator,
) -> OptimizationResult {
    assert!(cfg.population > 0 && cfg.iterations > 0, "empty GA budget");
    let mut r = rng::rng_from(rng::derive_named(seed, "ga"));
    let mut next_id = 0u64;
    let mut log = Vec::new();
    let mut trace = FitnessTrace {
        optimizer: String::from("ga"),
        seed,
        best_so_far: Vec::new(),
        iteration_best: Vec::new(),
        evaluations: 0,
    };
    let mut evaluate = |hps: Vec<Hyperparams>, iteration: usize, log: &mut Vec<EvaluationRecord>| -> Vec<Member> {
        let wave: Vec<(u64, Hyperparams)> = hps
            .into_iter()
            .map(|hp| {
                next_id += 1;
                (next_id - 1, hp)
            })
            .collect();
        let fit = evaluator.evaluate_wave(objective, &wave);
        wave.into_iter()
            .zip(fit)
            .map(|((id, hp), f)| {
                let f = sanitize(f);
                log.push(EvaluationRecord {
                    eval_id: id,
                    iteration,
                    hyperparams: hp.clone(),
                    fitness: f,
                });
                Member { hp, fitness: f, id }
            })
            .collect()
    };

    let initial: Vec<Hyperparams> = (0..cfg.population).map(|_| space.sample(&mut r)).collect();
    let mut pop = evaluate(initial, 1, &mut log);
    let mut best = pop[0].clone();
    let record = |pop: &[Member], best: &mut Member, trace: &mut FitnessTrace| {
        let mut it_best = &pop[0];
        for m in pop {
            if beats((m.fitness, m.id), (it_best.fitness, it_best.id)) {
                it_best = m;
            }
        }
        if beats((it_best.fitness, it_best.id), (best.fitness, best.id)) {
            *best = it_best.clone();
        }
        trace.iteration_best.push(it_best.fitness);
        trace.best_so_far.push(best.fitness);
    };
    record(&pop, &mut best, &mut trace);

    for iteration in 2..=cfg.iterations {
        let offspring: Vec<Hyperparams> = (0..cfg.population)
            .map(|_| {
                let a = tournament(&pop, cfg.tournament, &mut r).hp.clone();
                let b = &tournament(&pop, cfg.tournament, &mut r).hp;
                let mut child = Hyperparams::new();
                for d in &space.dims {
                    let src = if r.random_bool(0.5) { &a } else { b };
                    child.set(&d.name, src.get(&d.name).expect("parents are complete").clone());
                }
                if !space.is_empty() && r.random::<f64>() < cfg.mutation_rate {
                    let d = &space.dims[r.random_range(0..space.len())];
                    child.set(&d.name, d.domain.sample(&mut r));
                }
                child
            })
            .collect();
        pop = evaluate(offspring, iteration, &mut log);
        // Elitism: the best individual so far replaces the worst offspring
        // (the later one among equals).
        let mut worst = 0;
        for (i, m) in pop.iter().enumerate() {
            if !beats((m.fitness, m.id), (pop[worst].fitness, pop[worst].id)) {
                worst = i;
            }
        }
        pop[worst] = best.clone();
        record(&pop, &mut best, &mut trace);
    }

    trace.evaluations = log.len();
    OptimizationResult {
        best: Candidate {
            hyperparams: best.hp,
            fitness: Some(best.fitness),
            eval_id: best.id,
        },
        trace,
        log,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::HpValue;
    use crate::metaheuristics::{Domain, Serial};
    use alloc::vec;

    fn sphere_space() -> SearchSpace {
        SearchSpace::new(vec![
            ("a", Domain::FloatRange { lo: -5.0, hi: 5.0 }),
            ("b", Domain::FloatRange { lo: -5.0, hi: 5.0 }),
        ])
        .unwrap()
    }

    fn sphere(hp: &Hyperparams, _: u64) -> f64 {
        let a = hp.float("a").unwrap();
        let b = hp.float("b").unwrap();
        a * a + b * b
    }

    #[test]
    fn sphere_converges_within_budget() {
        for seed in 0..5 {
            let res = ga_optimize(&sphere, &sphere_space(), &GaConfig::default(), seed, &Serial);
            assert_eq!(res.trace.evaluations, 750);
            assert!(res.best.fitness.unwrap() < 1e-2, "seed {seed}: {:?}", res.best.fitness);
            assert!(res.trace.best_so_far.windows(2).all(|w| w[1] <= w[0]));
            for i in 1..res.trace.iteration_best.len() {
                assert!(res.trace.iteration_best[i] <= res.trace.best_so_far[i - 1]);
            }
        }
    }

    #[test]
    fn flat_objective_and_determinism() {
        let seven = |_: &Hyperparams, _: u64| 7.0;
        let a = ga_optimize(&seven, &sphere_space(), &GaConfig::default(), 3, &Serial);
        assert_eq!(a.best.fitness, Some(7.0));
        assert_eq!(a.best.eval_id, 0);
        assert!(a.trace.best_so_far.iter().all(|&f| f == 7.0));
        let b = ga_optimize(&seven, &sphere_space(), &GaConfig::default(), 3, &Serial);
        assert_eq!(a, b);
    }

    #[test]
    fn every_candidate_in_domain() {
        let space = SearchSpace::new(vec![
            ("n", Domain::IntRange { lo: 1, hi: 4 }),
            ("k", Domain::categorical(&["x", "y"])),
            ("flag", Domain::Boolean),
        ])
        .unwrap();
        let f = |hp: &Hyperparams, _: u64| match hp.get("k") {
            Some(HpValue::Token(t)) if t == "x" => hp.float("n").unwrap(),
            _ => 10.0,
        };
        let res = ga_optimize(&f, &space, &GaConfig::default(), 1, &Serial);
        assert!(res.log.iter().all(|e| space.contains(&e.hyperparams)));
        assert_eq!(res.best.fitness, Some(1.0));
    }
}
