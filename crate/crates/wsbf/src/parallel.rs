use rayon::prelude::*;
use wsbf_core::learners::Hyperparams;
use wsbf_core::metaheuristics::{Objective, WaveEvaluator};

/// Scores a wave on the rayon pool. Output order follows the wave, so runs
/// match [`wsbf_core::metaheuristics::Serial`] exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl WaveEvaluator for Rayon {
    fn evaluate_wave(&self, objective: &dyn Objective, wave: &[(u64, Hyperparams)]) -> Vec<f64> {
        wave.par_iter().map(|(id, hp)| objective.evaluate(hp, *id)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wsbf_core::metaheuristics::{ga_optimize, pso_optimize, Domain, GaConfig, PsoConfig, SearchSpace, Serial};

    #[test]
    fn parallel_matches_serial() {
        let space = SearchSpace::new(vec![
            ("x", Domain::FloatRange { lo: -3.0, hi: 3.0 }),
            ("n", Domain::IntRange { lo: 0, hi: 9 }),
        ])
        .unwrap();
        let f = |hp: &Hyperparams, id: u64| {
            let x = hp.float("x").unwrap();
            (x - 1.0).abs() + hp.float("n").unwrap() + (id % 3) as f64 * 1e-3
        };
        let ga = GaConfig::default();
        assert_eq!(ga_optimize(&f, &space, &ga, 4, &Serial), ga_optimize(&f, &space, &ga, 4, &Rayon));
        let pso = PsoConfig::default();
        assert_eq!(pso_optimize(&f, &space, &pso, 4, &Serial), pso_optimize(&f, &space, &pso, 4, &Rayon));
    }
}
