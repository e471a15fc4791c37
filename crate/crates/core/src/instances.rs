//! Synthetic hospital-unit instances.
//!
//! A generated week runs 06:00 to 23:30 (slots 12..=47) with per-skill
//! minimum demand proportional to the unit's headcount, a midday peak and
//! heavier weekends. Employees get a few random unavailability windows.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, ModelError};
use crate::model::{
    ConstraintParams, DemandGrid, Employee, Instance, PenaltyWeights, Skill, SKILL_COUNT, SLOTS_PER_DAY,
};
use crate::rng::{purpose, substream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitProfile {
    pub name: String,
    /// Headcount per skill, L1 to L4.
    pub counts: [u32; SKILL_COUNT],
    pub demand_scale: f64,
}

impl UnitProfile {
    pub fn new(name: &str, counts: [u32; SKILL_COUNT]) -> Self {
        UnitProfile {
            name: name.to_string(),
            counts,
            demand_scale: 1.0,
        }
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.total() == 0 {
            return Err(ModelError::invalid(
                "profile.counts",
                "unit needs at least one employee",
            ));
        }
        if self.counts[0] + self.counts[1] == 0 {
            return Err(ModelError::invalid("profile.counts", "unit needs an L1 or L2 employee"));
        }
        if !(self.demand_scale > 0.0 && self.demand_scale.is_finite()) {
            return Err(ModelError::invalid("profile.demand_scale", "must be positive"));
        }
        Ok(())
    }
}

/// The five hospital units used throughout the experiments.
pub fn builtin_profiles() -> Vec<UnitProfile> {
    vec![
        UnitProfile::new("unit1", [1, 1, 21, 3]),
        UnitProfile::new("unit2", [1, 1, 9, 3]),
        UnitProfile::new("unit3", [1, 1, 16, 5]),
        UnitProfile::new("unit4", [1, 1, 6, 2]),
        UnitProfile::new("unit5", [1, 1, 25, 6]),
    ]
}

pub fn builtin_profile(name: &str) -> Option<UnitProfile> {
    builtin_profiles().into_iter().find(|p| p.name == name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorKnobs {
    pub days: usize,
    /// First and last operating slot, inclusive.
    pub open_slot: usize,
    pub close_slot: usize,
    /// Off-peak minimum demand as a fraction of the skill's headcount.
    pub base_fraction: f64,
    /// Midday peak slots, inclusive.
    pub midday_slots: (usize, usize),
    pub midday_multiplier: f64,
    /// Days with heavier demand.
    pub weekend_days: Vec<usize>,
    pub weekend_multiplier: f64,
    /// Demand multiplier from `evening_from_slot` to closing.
    pub evening_from_slot: usize,
    pub evening_multiplier: f64,
    /// Ideal headcount above the minimum, for every staffed skill, in slots
    /// where the aggregate minimum is nonzero.
    pub ideal_offset: u32,
    /// Skill levels whose holders count as managers.
    pub manager_skills: Vec<Skill>,
    pub day_off_probability: f64,
    pub partial_block_probability: f64,
    pub partial_block_slots: usize,
    pub max_daily_hours: f64,
    pub max_weekly_hours: f64,
    pub contracted_weekly_hours: f64,
    pub constraints: ConstraintParams,
}

impl Default for GeneratorKnobs {
    fn default() -> Self {
        GeneratorKnobs {
            days: 7,
            open_slot: 12,
            close_slot: 47,
            base_fraction: 0.25,
            midday_slots: (22, 30),
            midday_multiplier: 1.5,
            weekend_days: vec![5, 6],
            weekend_multiplier: 1.25,
            evening_from_slot: 40,
            evening_multiplier: 0.5,
            ideal_offset: 1,
            manager_skills: vec![Skill::L1, Skill::L2],
            day_off_probability: 0.15,
            partial_block_probability: 0.25,
            partial_block_slots: 8,
            max_daily_hours: 9.0,
            max_weekly_hours: 40.0,
            contracted_weekly_hours: 40.0,
            constraints: ConstraintParams::default(),
        }
    }
}

impl GeneratorKnobs {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError(format!("generator: {m}")));
        if self.days == 0 {
            return bad("days must be >= 1");
        }
        if self.open_slot > self.close_slot || self.close_slot >= SLOTS_PER_DAY {
            return bad("need open_slot <= close_slot < 48");
        }
        if self.midday_slots.0 > self.midday_slots.1 || self.midday_slots.1 >= SLOTS_PER_DAY {
            return bad("midday_slots out of range");
        }
        for x in [
            self.base_fraction,
            self.midday_multiplier,
            self.weekend_multiplier,
            self.evening_multiplier,
        ] {
            if !(x.is_finite() && x >= 0.0) {
                return bad("demand fractions and multipliers must be >= 0");
            }
        }
        for p in [self.day_off_probability, self.partial_block_probability] {
            if !(0.0..=1.0).contains(&p) {
                return bad("probabilities must lie in [0, 1]");
            }
        }
        if self.partial_block_slots == 0 || self.partial_block_slots > self.close_slot + 1 - self.open_slot {
            return bad("partial_block_slots must fit inside the operating window");
        }
        if self.manager_skills.is_empty() {
            return bad("manager_skills must not be empty");
        }
        Ok(())
    }

    /// Minimum demand for `count` holders of a skill at `(day, slot)`.
    fn min_demand(&self, count: u32, scale: f64, day: usize, slot: usize) -> u32 {
        if slot < self.open_slot || slot > self.close_slot || count == 0 {
            return 0;
        }
        let mut f = self.base_fraction * scale;
        if (self.midday_slots.0..=self.midday_slots.1).contains(&slot) {
            f *= self.midday_multiplier;
        }
        if slot >= self.evening_from_slot {
            f *= self.evening_multiplier;
        }
        if self.weekend_days.contains(&day) {
            f *= self.weekend_multiplier;
        }
        (count as f64 * f).round() as u32
    }
}

/// Seed and settings a generated instance came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorManifest {
    pub profile: UnitProfile,
    pub knobs: GeneratorKnobs,
    pub seed: u64,
}

/// Builds a deterministic instance for `profile`.
pub fn generate_instance(
    profile: &UnitProfile,
    knobs: &GeneratorKnobs,
    weights: &PenaltyWeights,
    seed: u64,
) -> Result<Instance, ModelError> {
    profile.validate()?;
    knobs.validate().map_err(|e| ModelError::invalid("generator", e.0))?;
    let days = knobs.days;
    let mut rng = substream(seed, purpose::GENERATOR, 0, 0);

    let mut demand = DemandGrid::zeros(days);
    for d in 0..days {
        for t in 0..SLOTS_PER_DAY {
            for s in Skill::ALL {
                demand.min_required[d][t][s.index()] =
                    knobs.min_demand(profile.counts[s.index()], profile.demand_scale, d, t);
            }
            if demand.total_min(d, t) > 0 {
                for s in Skill::ALL.into_iter().filter(|s| profile.counts[s.index()] > 0) {
                    demand.ideal[d][t][s.index()] = demand.min_required[d][t][s.index()] + knobs.ideal_offset;
                }
            }
        }
    }

    let mut employees = Vec::with_capacity(profile.total() as usize);
    for s in Skill::ALL {
        for k in 0..profile.counts[s.index()] {
            let mut e = Employee::new(format!("{s}-{:02}", k + 1), s, knobs.manager_skills.contains(&s), days);
            e.max_daily_hours = knobs.max_daily_hours;
            e.max_weekly_hours = knobs.max_weekly_hours;
            e.contracted_weekly_hours = knobs.contracted_weekly_hours;
            if rng.gen_bool(knobs.day_off_probability) {
                let d = rng.gen_range(0..days);
                e.unavailability[d].iter_mut().for_each(|u| *u = true);
            }
            if rng.gen_bool(knobs.partial_block_probability) {
                let d = rng.gen_range(0..days);
                let start = rng.gen_range(knobs.open_slot..=knobs.close_slot + 1 - knobs.partial_block_slots);
                for t in start..start + knobs.partial_block_slots {
                    e.unavailability[d][t] = true;
                }
            }
            employees.push(e);
        }
    }

    let instance = Instance {
        unit_id: profile.name.clone(),
        days,
        employees,
        demand,
        constraints: knobs.constraints.clone(),
        weights: weights.clone(),
    };
    instance.validate()?;
    Ok(instance)
}
