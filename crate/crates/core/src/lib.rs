//! Multi-objective staff rostering for hospital units.
//!
//! A [`Schedule`] assigns employees to half-hour slots over a horizon of days.
//! [`evaluate`] prices it with ten weighted penalties grouped into three
//! objectives (staffing cost, service failure, staff dissatisfaction), and
//! [`run_nsga2`] searches for the Pareto front of those objectives. A greedy
//! heuristic and a single-objective GA serve as baselines.

pub mod baselines;
pub mod codec;
pub mod compare;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod instances;
pub mod model;
pub mod moo;
pub mod reports;
pub mod rng;
pub mod variation;

pub use baselines::{run_greedy_baseline, run_soga, GreedyBaseline, SogaOutcome};
pub use codec::{decode_instance, decode_schedule, encode_instance, encode_schedule};
pub use config::{Config, CrossoverMix, GaConfig};
pub use error::{ConfigError, ModelError, SolveError};
pub use evaluation::{evaluate, Evaluator, FitnessVector, PenaltyBreakdown};
pub use instances::{builtin_profiles, generate_instance, GeneratorKnobs, UnitProfile};
pub use model::{
    ConstraintParams, DemandGrid, Employee, HeadcountFilter, Instance, PenaltyWeights, Schedule, ShiftBlock, Skill,
    SLOTS_PER_DAY,
};
pub use moo::{crowding_distance, dominates, fast_non_dominated_sort, run_nsga2, Nsga2Outcome, RankedIndividual};
pub use reports::{select_balanced, select_extreme, Method, RunReport};
