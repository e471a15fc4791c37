//! Solver and experiment configuration.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::instances::GeneratorKnobs;
use crate::model::PenaltyWeights;

/// Probabilities of picking each crossover operator for one offspring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossoverMix {
    pub day_point: f64,
    pub uniform: f64,
    pub two_point_slot: f64,
}

impl Default for CrossoverMix {
    fn default() -> Self {
        CrossoverMix {
            day_point: 0.0,
            uniform: 0.0,
            two_point_slot: 1.0,
        }
    }
}

impl CrossoverMix {
    pub fn uniform_mix() -> Self {
        CrossoverMix {
            day_point: 1.0 / 3.0,
            uniform: 1.0 / 3.0,
            two_point_slot: 1.0 / 3.0,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let p = [self.day_point, self.uniform, self.two_point_slot];
        if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(ConfigError("crossover probabilities must be >= 0".into()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ConfigError(format!("crossover probabilities sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    /// Probability that one offspring receives a mutation.
    pub mutation_rate: f64,
    pub crossover: CrossoverMix,
    /// Individuals copied unchanged per generation by the single-objective GA.
    pub elitism_count: usize,
    /// Chance that a random individual works a given operating day.
    pub random_work_probability: f64,
    pub master_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 400,
            generations: 50,
            tournament_size: 2,
            mutation_rate: 0.1,
            crossover: CrossoverMix::default(),
            elitism_count: 2,
            random_work_probability: 0.7,
            master_seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size < 2 || !self.population_size.is_multiple_of(2) {
            return Err(ConfigError(format!(
                "population_size must be even and >= 2, got {}",
                self.population_size
            )));
        }
        if self.generations < 1 {
            return Err(ConfigError("generations must be >= 1".into()));
        }
        if self.tournament_size < 1 {
            return Err(ConfigError("tournament_size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(ConfigError("mutation_rate must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.random_work_probability) {
            return Err(ConfigError("random_work_probability must lie in [0, 1]".into()));
        }
        if self.elitism_count >= self.population_size {
            return Err(ConfigError("elitism_count must be below population_size".into()));
        }
        self.crossover.validate()
    }
}

/// Everything a config file can set. Missing sections fall back to defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub ga: GaConfig,
    /// Weights written into generated instances.
    pub weights: PenaltyWeights,
    pub generator: GeneratorKnobs,
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.ga.validate()?;
        self.weights.validate().map_err(|e| ConfigError(e.to_string()))?;
        self.generator.validate()
    }
}
