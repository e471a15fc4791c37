//! Comparison methods: repeated randomized greedy and a single-objective GA
//! minimizing `f1 + f2 + f3`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::GaConfig;
use crate::error::SolveError;
use crate::evaluation::{Evaluator, FitnessVector};
use crate::model::{Instance, Schedule};
use crate::moo::check_inputs;
use crate::rng::{purpose, substream};
use crate::variation::{crossover, greedy_construct, init_population, mutate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone)]
pub struct GreedyBaseline {
    pub best: Schedule,
    pub best_fitness: FitnessVector,
    /// Fitness of every run, in run order.
    pub runs: Vec<FitnessVector>,
    pub total: TotalStats,
    /// Per-objective means `(f1, f2, f3)` over all runs.
    pub mean_objectives: [f64; 3],
}

/// Runs the greedy heuristic `runs` times, run `i` on substream `i` of `seed`.
pub fn run_greedy_baseline(instance: &Instance, runs: usize, seed: u64) -> Result<GreedyBaseline, SolveError> {
    if runs == 0 {
        return Err(crate::error::ConfigError("greedy runs must be >= 1".into()).into());
    }
    instance.validate()?;
    let eval = Evaluator::new(instance);
    let one = |i: usize| {
        let mut rng = substream(seed, purpose::GREEDY_RUN, 0, i as u64);
        let s = greedy_construct(instance, &mut rng);
        let f = eval.evaluate(&s);
        (s, f)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<(Schedule, FitnessVector)> = {
        use rayon::prelude::*;
        (0..runs).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(Schedule, FitnessVector)> = (0..runs).map(one).collect();

    let mut best = 0;
    for (i, (_, f)) in results.iter().enumerate() {
        if f.total < results[best].1.total {
            best = i;
        }
    }
    let k = runs as f64;
    let sum = |g: fn(&FitnessVector) -> f64| results.iter().map(|(_, f)| g(f)).sum::<f64>();
    let total = TotalStats {
        mean: sum(|f| f.total) / k,
        min: results.iter().map(|(_, f)| f.total).fold(f64::INFINITY, f64::min),
        max: results.iter().map(|(_, f)| f.total).fold(f64::NEG_INFINITY, f64::max),
    };
    let mean_objectives = [sum(|f| f.f1) / k, sum(|f| f.f2) / k, sum(|f| f.f3) / k];
    let best_fitness = results[best].1;
    let best_schedule = results[best].0.clone();
    Ok(GreedyBaseline {
        best: best_schedule,
        best_fitness,
        runs: results.into_iter().map(|(_, f)| f).collect(),
        total,
        mean_objectives,
    })
}

#[derive(Debug, Clone)]
pub struct SogaOutcome {
    pub best: Schedule,
    pub best_fitness: FitnessVector,
    /// Best total of each generation, generation 0 first.
    pub best_total_history: Vec<f64>,
}

/// Tournament on scalar total: lower total wins, ties go to the lower index.
pub fn scalar_tournament<R: Rng + ?Sized>(fitness: &[FitnessVector], size: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..size.max(1) {
        let c = rng.gen_range(0..fitness.len());
        let (fc, fb) = (fitness[c].total, fitness[best].total);
        if fc < fb || (fc == fb && c < best) {
            best = c;
        }
    }
    best
}

fn ranking(fitness: &[FitnessVector]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[a].total.total_cmp(&fitness[b].total).then(a.cmp(&b)));
    order
}

/// Single-objective GA with the same initialization and operators as NSGA-II,
/// scalar tournament selection and `elitism_count` elites per generation.
pub fn run_soga(instance: &Instance, config: &GaConfig) -> Result<SogaOutcome, SolveError> {
    check_inputs(instance, config)?;
    let eval = Evaluator::new(instance);
    let n = config.population_size;
    let seed = config.master_seed;

    let mut pop = init_population(instance, config, seed);
    let mut fit = eval.evaluate_all(&pop);
    let mut history = vec![fit[ranking(&fit)[0]].total];

    for generation in 1..=config.generations {
        let order = ranking(&fit);
        let elites = config.elitism_count.min(n);
        let build = |i: usize| {
            let mut rng = substream(seed, purpose::SOGA_OFFSPRING, generation as u64, i as u64);
            let a = scalar_tournament(&fit, config.tournament_size, &mut rng);
            let b = scalar_tournament(&fit, config.tournament_size, &mut rng);
            let child = crossover(&pop[a], &pop[b], &config.crossover, &mut rng);
            mutate(&child, instance, config.mutation_rate, &mut rng)
        };
        #[cfg(feature = "parallel")]
        let children: Vec<Schedule> = {
            use rayon::prelude::*;
            (0..n - elites).into_par_iter().map(build).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let children: Vec<Schedule> = (0..n - elites).map(build).collect();
        let child_fit = eval.evaluate_all(&children);

        let mut next: Vec<Schedule> = order[..elites].iter().map(|&i| pop[i].clone()).collect();
        let mut next_fit: Vec<FitnessVector> = order[..elites].iter().map(|&i| fit[i]).collect();
        next.extend(children);
        next_fit.extend(child_fit);
        pop = next;
        fit = next_fit;
        history.push(fit[ranking(&fit)[0]].total);
    }

    let best = ranking(&fit)[0];
    Ok(SogaOutcome {
        best: pop.swap_remove(best),
        best_fitness: fit[best],
        best_total_history: history,
    })
}
