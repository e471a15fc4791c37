//! Greedy vs single-objective GA vs NSGA-II on one unit.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baselines::{run_greedy_baseline, run_soga, GreedyBaseline, SogaOutcome};
use crate::config::Config;
use crate::error::SolveError;
use crate::evaluation::FitnessVector;
use crate::instances::{generate_instance, UnitProfile};
use crate::model::Instance;
use crate::moo::{run_nsga2, Nsga2Outcome};
use crate::reports::{select_balanced, Method};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSettings {
    /// GA runs per method; run `i` uses master seed `base_seed + i`.
    pub seeds: usize,
    pub greedy_runs: usize,
    pub base_seed: u64,
    pub instance_seed: u64,
}

impl Default for CompareSettings {
    fn default() -> Self {
        CompareSettings {
            seeds: 5,
            greedy_runs: 1000,
            base_seed: 1,
            instance_seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub unit: String,
    pub method: Method,
    pub total: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    /// `100 * (greedy_mean_total - total) / greedy_mean_total`.
    pub improvement_vs_greedy_pct: f64,
    /// Same against the best SOGA total; only set for the NSGA-II row.
    pub improvement_vs_soga_pct: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub instance: Instance,
    /// Greedy, SOGA, MOO, in that order.
    pub rows: [ComparisonRow; 3],
    pub greedy: GreedyBaseline,
    pub soga_runs: Vec<SogaOutcome>,
    pub moo_runs: Vec<Nsga2Outcome>,
    /// Balanced member of each MOO run's front.
    pub moo_balanced: Vec<FitnessVector>,
}

fn improvement(reference: f64, value: f64) -> f64 {
    if reference == 0.0 {
        0.0
    } else {
        100.0 * (reference - value) / reference
    }
}

fn best_by_total(fits: &[FitnessVector]) -> FitnessVector {
    let mut best = fits[0];
    for f in &fits[1..] {
        if f.total < best.total {
            best = *f;
        }
    }
    best
}

/// Runs all three methods on `instance`.
pub fn compare_on_instance(
    instance: &Instance,
    config: &Config,
    settings: &CompareSettings,
) -> Result<Comparison, SolveError> {
    if settings.seeds == 0 {
        return Err(crate::error::ConfigError("compare needs at least one seed".into()).into());
    }
    let greedy = run_greedy_baseline(instance, settings.greedy_runs, settings.base_seed)?;

    let mut soga_runs = Vec::with_capacity(settings.seeds);
    let mut moo_runs = Vec::with_capacity(settings.seeds);
    let mut moo_balanced = Vec::with_capacity(settings.seeds);
    for i in 0..settings.seeds {
        let mut ga = config.ga.clone();
        ga.master_seed = settings.base_seed + i as u64;
        soga_runs.push(run_soga(instance, &ga)?);
        let out = run_nsga2(instance, &ga)?;
        let fits: Vec<FitnessVector> = out.front.iter().map(|r| r.fitness).collect();
        moo_balanced.push(fits[select_balanced(&fits)]);
        moo_runs.push(out);
    }

    let unit = instance.unit_id.clone();
    let g_total = greedy.total.mean;
    let [g1, g2, g3] = greedy.mean_objectives;
    let soga = best_by_total(&soga_runs.iter().map(|s| s.best_fitness).collect::<Vec<_>>());
    let moo = best_by_total(&moo_balanced);
    let row = |method, f: &FitnessVector, vs_soga| ComparisonRow {
        unit: unit.clone(),
        method,
        total: f.total,
        f1: f.f1,
        f2: f.f2,
        f3: f.f3,
        improvement_vs_greedy_pct: improvement(g_total, f.total),
        improvement_vs_soga_pct: vs_soga,
    };
    let rows = [
        ComparisonRow {
            unit: unit.clone(),
            method: Method::Greedy,
            total: g_total,
            f1: g1,
            f2: g2,
            f3: g3,
            improvement_vs_greedy_pct: 0.0,
            improvement_vs_soga_pct: None,
        },
        row(Method::Soga, &soga, None),
        row(Method::Moo, &moo, Some(improvement(soga.total, moo.total))),
    ];
    Ok(Comparison {
        instance: instance.clone(),
        rows,
        greedy,
        soga_runs,
        moo_runs,
        moo_balanced,
    })
}

/// Generates the unit's instance and runs the comparison on it.
pub fn compare_methods(
    profile: &UnitProfile,
    config: &Config,
    settings: &CompareSettings,
) -> Result<Comparison, SolveError> {
    config.validate()?;
    let instance = generate_instance(profile, &config.generator, &config.weights, settings.instance_seed)?;
    compare_on_instance(&instance, config, settings)
}

/// `unit,method,total,f1,f2,f3,improvement_vs_greedy_pct,improvement_vs_soga_pct`
pub fn write_comparison_csv<W: Write>(rows: &[ComparisonRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| std::io::Error::other(e.to_string());
    w.write_record([
        "unit",
        "method",
        "total",
        "f1",
        "f2",
        "f3",
        "improvement_vs_greedy_pct",
        "improvement_vs_soga_pct",
    ])
    .map_err(err)?;
    for r in rows {
        let method = match r.method {
            Method::Greedy => "greedy",
            Method::Soga => "soga",
            Method::Moo => "moo_balanced",
        };
        w.write_record([
            r.unit.clone(),
            method.to_string(),
            format!("{:.6}", r.total),
            format!("{:.6}", r.f1),
            format!("{:.6}", r.f2),
            format!("{:.6}", r.f3),
            format!("{:.6}", r.improvement_vs_greedy_pct),
            r.improvement_vs_soga_pct.map(|x| format!("{x:.6}")).unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    w.flush()
}
