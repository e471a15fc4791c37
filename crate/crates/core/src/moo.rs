//! NSGA-II: dominance, fast non-dominated sorting, crowding distance,
//! crowded binary tournament and the elitist generational loop.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::GaConfig;
use crate::error::{ConfigError, SolveError};
use crate::evaluation::{Evaluator, FitnessVector};
use crate::model::{Instance, Schedule};
use crate::rng::{purpose, substream};
use crate::variation::{crossover, init_population, mutate};

/// Anything with three objectives to minimize.
pub trait Objectives {
    fn objectives(&self) -> [f64; 3];
}

impl Objectives for FitnessVector {
    fn objectives(&self) -> [f64; 3] {
        FitnessVector::objectives(self)
    }
}

impl Objectives for [f64; 3] {
    fn objectives(&self) -> [f64; 3] {
        *self
    }
}

impl<T: Objectives> Objectives for &T {
    fn objectives(&self) -> [f64; 3] {
        (*self).objectives()
    }
}

/// `a` is no worse than `b` in every objective and strictly better in one.
pub fn dominates<A: Objectives, B: Objectives>(a: &A, b: &B) -> bool {
    let (a, b) = (a.objectives(), b.objectives());
    let mut strict = false;
    for k in 0..3 {
        if a[k] > b[k] {
            return false;
        }
        if a[k] < b[k] {
            strict = true;
        }
    }
    strict
}

/// Partitions indices into fronts; `fronts[0]` is the non-dominated set.
/// Indices within a front are ascending.
pub fn fast_non_dominated_sort<T: Objectives>(population: &[T]) -> Vec<Vec<usize>> {
    let n = population.len();
    let objs: Vec<[f64; 3]> = population.iter().map(|p| p.objectives()).collect();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    let mut current = Vec::new();

    for p in 0..n {
        for q in (p + 1)..n {
            if dominates(&objs[p], &objs[q]) {
                dominated_by_me[p].push(q);
                domination_count[q] += 1;
            } else if dominates(&objs[q], &objs[p]) {
                dominated_by_me[q].push(p);
                domination_count[p] += 1;
            }
        }
    }
    for p in 0..n {
        if domination_count[p] == 0 {
            current.push(p);
        }
    }

    let mut fronts = Vec::new();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by_me[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of one front.
///
/// Fronts of one or two members are all boundary points and get
/// `f64::INFINITY`. Otherwise, per objective with a nonzero range, the two
/// extremes of a stable sort get infinity and interior points add the
/// normalized gap between their neighbours. Objectives with zero range add
/// nothing.
pub fn crowding_distance<T: Objectives>(front: &[T]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let objs: Vec<[f64; 3]> = front.iter().map(|p| p.objectives()).collect();
    let mut dist = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..3 {
        order.sort_by(|&a, &b| objs[a][k].total_cmp(&objs[b][k]).then(a.cmp(&b)));
        let lo = objs[order[0]][k];
        let hi = objs[order[n - 1]][k];
        let range = hi - lo;
        if range.is_nan() || range <= 0.0 {
            continue;
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let i = order[w];
            if dist[i].is_finite() {
                dist[i] += (objs[order[w + 1]][k] - objs[order[w - 1]][k]) / range;
            }
        }
    }
    dist
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedIndividual {
    pub schedule: Schedule,
    pub fitness: FitnessVector,
    /// Front index, 1 for the non-dominated front.
    pub rank: usize,
    /// Crowding distance within the front; `f64::INFINITY` for boundary points.
    pub crowding: f64,
}

/// Crowded comparison: lower rank, then larger crowding, then lower index.
fn crowded_better(pop: &[RankedIndividual], a: usize, b: usize) -> bool {
    match pop[a].rank.cmp(&pop[b].rank) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => match pop[a].crowding.total_cmp(&pop[b].crowding) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => a < b,
        },
    }
}

/// Draws `size` contestants uniformly with replacement and returns the
/// index of the crowded-comparison winner.
pub fn tournament_select<R: Rng + ?Sized>(ranked: &[RankedIndividual], size: usize, rng: &mut R) -> usize {
    assert!(!ranked.is_empty());
    let mut best = rng.gen_range(0..ranked.len());
    for _ in 1..size.max(1) {
        let c = rng.gen_range(0..ranked.len());
        if crowded_better(ranked, c, best) {
            best = c;
        }
    }
    best
}

/// One record of the progress stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub front_size: usize,
    pub min_f1: f64,
    pub min_f2: f64,
    pub min_f3: f64,
    pub min_total: f64,
}

impl GenerationStats {
    fn of(generation: usize, pop: &[RankedIndividual]) -> Self {
        let front: Vec<&RankedIndividual> = pop.iter().filter(|r| r.rank == 1).collect();
        let min = |f: fn(&FitnessVector) -> f64| front.iter().map(|r| f(&r.fitness)).fold(f64::INFINITY, f64::min);
        GenerationStats {
            generation,
            front_size: front.len(),
            min_f1: min(|f| f.f1),
            min_f2: min(|f| f.f2),
            min_f3: min(|f| f.f3),
            min_total: min(|f| f.total),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Nsga2Outcome {
    /// Deduplicated first front of the final population.
    pub front: Vec<RankedIndividual>,
    /// Generation 0 is the initial population.
    pub history: Vec<GenerationStats>,
}

/// Assigns ranks and crowding to a whole population.
pub fn rank_population(schedules: Vec<Schedule>, fitness: Vec<FitnessVector>) -> Vec<RankedIndividual> {
    let fronts = fast_non_dominated_sort(&fitness);
    let mut rank = vec![0; fitness.len()];
    let mut crowd = vec![0.0; fitness.len()];
    for (r, front) in fronts.iter().enumerate() {
        let members: Vec<&FitnessVector> = front.iter().map(|&i| &fitness[i]).collect();
        for (&i, c) in front.iter().zip(crowding_distance(&members)) {
            rank[i] = r + 1;
            crowd[i] = c;
        }
    }
    schedules
        .into_iter()
        .zip(fitness)
        .enumerate()
        .map(|(i, (schedule, fitness))| RankedIndividual {
            schedule,
            fitness,
            rank: rank[i],
            crowding: crowd[i],
        })
        .collect()
}

/// Environmental selection: whole fronts in rank order, the first front that
/// does not fit truncated by descending crowding distance (ties by index).
pub fn select_survivors(merged: Vec<Schedule>, fitness: Vec<FitnessVector>, n: usize) -> Vec<RankedIndividual> {
    let fronts = fast_non_dominated_sort(&fitness);
    let mut keep: Vec<(usize, usize, f64)> = Vec::with_capacity(n);
    for (r, front) in fronts.iter().enumerate() {
        if keep.len() >= n {
            break;
        }
        let members: Vec<&FitnessVector> = front.iter().map(|&i| &fitness[i]).collect();
        let dist = crowding_distance(&members);
        let mut entries: Vec<(usize, usize, f64)> = front.iter().zip(dist).map(|(&i, c)| (i, r + 1, c)).collect();
        if keep.len() + entries.len() > n {
            entries.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
            entries.truncate(n - keep.len());
        }
        keep.extend(entries);
    }
    keep.sort_by_key(|e| e.0);

    let mut slots: Vec<Option<(Schedule, FitnessVector)>> = merged.into_iter().zip(fitness).map(Some).collect();
    keep.into_iter()
        .map(|(i, rank, crowding)| {
            let (schedule, fitness) = slots[i].take().expect("each index kept once");
            RankedIndividual {
                schedule,
                fitness,
                rank,
                crowding,
            }
        })
        .collect()
}

/// Creates the offspring population of one generation. Child `i` draws all
/// of its randomness from the `(seed, generation, i)` substream.
fn make_offspring(
    parents: &[RankedIndividual],
    instance: &Instance,
    config: &GaConfig,
    generation: usize,
) -> Vec<Schedule> {
    let build = |i: usize| {
        let mut rng = substream(config.master_seed, purpose::OFFSPRING, generation as u64, i as u64);
        let a = tournament_select(parents, config.tournament_size, &mut rng);
        let b = tournament_select(parents, config.tournament_size, &mut rng);
        let child = crossover(&parents[a].schedule, &parents[b].schedule, &config.crossover, &mut rng);
        mutate(&child, instance, config.mutation_rate, &mut rng)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..config.population_size).into_par_iter().map(build).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..config.population_size).map(build).collect()
    }
}

pub(crate) fn check_inputs(instance: &Instance, config: &GaConfig) -> Result<(), SolveError> {
    config.validate()?;
    if instance.employees.is_empty() {
        return Err(ConfigError("instance has no employees".into()).into());
    }
    instance.validate()?;
    Ok(())
}

/// Runs NSGA-II and returns the deduplicated first front of the final
/// population together with per-generation statistics.
pub fn run_nsga2(instance: &Instance, config: &GaConfig) -> Result<Nsga2Outcome, SolveError> {
    run_nsga2_with(instance, config, |_| {})
}

/// Like [`run_nsga2`], calling `observe` with each generation's statistics.
pub fn run_nsga2_with(
    instance: &Instance,
    config: &GaConfig,
    mut observe: impl FnMut(&GenerationStats),
) -> Result<Nsga2Outcome, SolveError> {
    check_inputs(instance, config)?;
    let eval = Evaluator::new(instance);
    let n = config.population_size;

    let initial = init_population(instance, config, config.master_seed);
    let fitness = eval.evaluate_all(&initial);
    let mut population = rank_population(initial, fitness);
    let mut history = vec![GenerationStats::of(0, &population)];
    observe(&history[0]);

    for generation in 1..=config.generations {
        let offspring = make_offspring(&population, instance, config, generation);
        let offspring_fitness = eval.evaluate_all(&offspring);

        let mut merged = Vec::with_capacity(2 * n);
        let mut merged_fitness = Vec::with_capacity(2 * n);
        for r in population {
            merged.push(r.schedule);
            merged_fitness.push(r.fitness);
        }
        merged.extend(offspring);
        merged_fitness.extend(offspring_fitness);

        population = select_survivors(merged, merged_fitness, n);
        let stats = GenerationStats::of(generation, &population);
        observe(&stats);
        history.push(stats);
    }

    Ok(Nsga2Outcome {
        front: dedup_front(population),
        history,
    })
}

/// First-front members with duplicates removed (first occurrence kept) and
/// crowding recomputed over what remains.
pub fn dedup_front(population: Vec<RankedIndividual>) -> Vec<RankedIndividual> {
    let mut seen = HashSet::new();
    let mut front: Vec<RankedIndividual> = population
        .into_iter()
        .filter(|r| r.rank == 1 && seen.insert(r.schedule.clone()))
        .collect();
    let dist = crowding_distance(&front.iter().map(|r| &r.fitness).collect::<Vec<_>>());
    for (r, c) in front.iter_mut().zip(dist) {
        r.crowding = c;
    }
    front
}
