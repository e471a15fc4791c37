mod oracle;

use std::collections::HashSet;

use oracle::{toy_brute_force, toy_instance};
use roster_core::instances::builtin_profile;
use roster_core::moo::run_nsga2_with;
use roster_core::variation::init_population;
use roster_core::*;

fn unit(name: &str, seed: u64) -> Instance {
    generate_instance(
        &builtin_profile(name).unwrap(),
        &GeneratorKnobs::default(),
        &PenaltyWeights::default(),
        seed,
    )
    .unwrap()
}

fn small_ga(seed: u64) -> GaConfig {
    GaConfig {
        population_size: 40,
        generations: 10,
        master_seed: seed,
        ..GaConfig::default()
    }
}

#[test]
fn toy_optimum_is_reached() {
    let inst = toy_instance();
    let (min_f2, min_total) = toy_brute_force(&inst);
    // Nurse and manager both on 12..=19: no shortfall, no manager gap,
    // eight slots of L1 over-coverage.
    assert_eq!((min_f2, min_total), (0.0, 8.0));

    let cfg = GaConfig {
        population_size: 100,
        generations: 50,
        master_seed: 3,
        ..GaConfig::default()
    };
    let moo = run_nsga2(&inst, &cfg).unwrap();
    assert!(moo.front.iter().any(|r| r.fitness.f2 == min_f2));
    let soga = run_soga(&inst, &cfg).unwrap();
    assert_eq!(soga.best_fitness.total, min_total);
}

#[test]
fn nsga2_is_deterministic() {
    let inst = unit("unit4", 5);
    let a = run_nsga2(&inst, &small_ga(9)).unwrap();
    let b = run_nsga2(&inst, &small_ga(9)).unwrap();
    assert_eq!(a.front, b.front);
    assert_eq!(a.history, b.history);
    let c = run_nsga2(&inst, &small_ga(10)).unwrap();
    assert_ne!(a.history, c.history);
}

#[test]
fn soga_and_greedy_are_deterministic() {
    let inst = unit("unit2", 5);
    let a = run_soga(&inst, &small_ga(4)).unwrap();
    let b = run_soga(&inst, &small_ga(4)).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.best_total_history, b.best_total_history);
    let g1 = run_greedy_baseline(&inst, 50, 2).unwrap();
    let g2 = run_greedy_baseline(&inst, 50, 2).unwrap();
    assert_eq!(g1.runs, g2.runs);
    assert_eq!(g1.best, g2.best);
}

#[test]
fn soga_elitism_never_loses_the_best() {
    let inst = unit("unit4", 6);
    let out = run_soga(&inst, &small_ga(1)).unwrap();
    assert_eq!(out.best_total_history.len(), 11);
    assert!(out.best_total_history.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*out.best_total_history.last().unwrap(), out.best_fitness.total);
}

#[test]
fn nsga2_front_is_valid() {
    let inst = unit("unit2", 7);
    let mut seen = 0;
    let out = run_nsga2_with(&inst, &small_ga(2), |s| {
        assert_eq!(s.generation, seen);
        seen += 1;
    })
    .unwrap();
    assert_eq!(seen, 11);
    let front = &out.front;
    assert!(!front.is_empty());
    for a in front {
        assert_eq!(a.rank, 1);
        assert_eq!(a.fitness, evaluate(&a.schedule, &inst));
        for b in front {
            assert!(!dominates(&a.fitness, &b.fitness));
        }
    }
    let distinct: HashSet<&Schedule> = front.iter().map(|r| &r.schedule).collect();
    assert_eq!(distinct.len(), front.len());
}

#[test]
fn nsga2_best_total_never_regresses_in_front() {
    // Elitist survival keeps every first-front point unless it is dominated,
    // so the minimum of each objective over the front is non-increasing.
    let inst = unit("unit4", 8);
    let out = run_nsga2(&inst, &small_ga(3)).unwrap();
    for w in out.history.windows(2) {
        assert!(w[1].min_f1 <= w[0].min_f1);
        assert!(w[1].min_f2 <= w[0].min_f2);
        assert!(w[1].min_f3 <= w[0].min_f3);
    }
}

#[test]
fn greedy_never_overstaffs() {
    for p in builtin_profiles() {
        let inst = unit(&p.name, 42);
        let g = run_greedy_baseline(&inst, 100, 1).unwrap();
        for f in &g.runs {
            assert_eq!(f.breakdown.over_coverage, 0.0);
            assert_eq!(f.breakdown.zero_demand, 0.0);
        }
        assert!(g.total.min <= g.total.mean && g.total.mean <= g.total.max);
        assert_eq!(g.best_fitness.total, g.total.min);
    }
}

#[test]
fn hybrid_initialization_split() {
    let inst = unit("unit4", 1);
    for (n, greedy) in [(2, 1), (10, 5), (400, 200)] {
        let cfg = GaConfig {
            population_size: n,
            ..GaConfig::default()
        };
        let pop = init_population(&inst, &cfg, 1);
        assert_eq!(pop.len(), n);
        let g = pop.iter().filter(|s| evaluate(s, &inst).f1 == 0.0).count();
        // Greedy members never overstaff; random ones almost surely do.
        assert!(g >= greedy);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let inst = unit("unit4", 1);
    let odd = GaConfig {
        population_size: 7,
        ..GaConfig::default()
    };
    assert!(matches!(run_nsga2(&inst, &odd), Err(SolveError::Config(_))));
    assert!(matches!(run_soga(&inst, &odd), Err(SolveError::Config(_))));
    assert!(matches!(run_greedy_baseline(&inst, 0, 1), Err(SolveError::Config(_))));
}
