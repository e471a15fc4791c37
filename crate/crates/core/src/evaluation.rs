//! The ten weighted penalty components and the objective vector `(f1, f2, f3)`.
//!
//! * f1, staffing cost: over-coverage above the per-skill ideal and any staff
//!   placed in slots with zero aggregate demand.
//! * f2, service failure: per-skill shortfall below the minimum and staffed
//!   slots without a manager on duty.
//! * f3, dissatisfaction: unavailability breaches, split shifts, shift-length
//!   violations, missing rest, and daily/weekly hour overruns.
//!
//! Every component is accumulated as an unweighted violation measure and
//! multiplied by its weight once, so a component is exactly `weight * measure`.

use serde::{Deserialize, Serialize};

use crate::model::{runs_of, EmployeeMasks, Instance, Schedule, Skill, SLOTS_PER_DAY, SLOT_MINUTES};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PenaltyBreakdown {
    pub over_coverage: f64,
    pub zero_demand: f64,
    pub shortfall: f64,
    pub missing_manager: f64,
    pub unavailability: f64,
    pub split_shift: f64,
    pub shift_length: f64,
    pub rest: f64,
    pub daily_hours: f64,
    pub weekly_hours: f64,
}

impl PenaltyBreakdown {
    pub const NAMES: [&'static str; 10] = [
        "over_coverage",
        "zero_demand",
        "shortfall",
        "missing_manager",
        "unavailability",
        "split_shift",
        "shift_length",
        "rest",
        "daily_hours",
        "weekly_hours",
    ];

    pub fn as_array(&self) -> [f64; 10] {
        [
            self.over_coverage,
            self.zero_demand,
            self.shortfall,
            self.missing_manager,
            self.unavailability,
            self.split_shift,
            self.shift_length,
            self.rest,
            self.daily_hours,
            self.weekly_hours,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessVector {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub total: f64,
    pub breakdown: PenaltyBreakdown,
}

impl FitnessVector {
    pub fn from_breakdown(b: PenaltyBreakdown) -> Self {
        let f1 = b.over_coverage + b.zero_demand;
        let f2 = b.shortfall + b.missing_manager;
        let f3 = b.unavailability + b.split_shift + b.shift_length + b.rest + b.daily_hours + b.weekly_hours;
        FitnessVector {
            f1,
            f2,
            f3,
            total: f1 + f2 + f3,
            breakdown: b,
        }
    }

    /// Objective vector used for dominance, without the breakdown.
    pub fn from_objectives(f1: f64, f2: f64, f3: f64) -> Self {
        FitnessVector {
            f1,
            f2,
            f3,
            total: f1 + f2 + f3,
            breakdown: PenaltyBreakdown::default(),
        }
    }

    pub fn objectives(&self) -> [f64; 3] {
        [self.f1, self.f2, self.f3]
    }
}

/// Six dissatisfaction components, in breakdown order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DissatisfactionPenalties {
    pub unavailability: f64,
    pub split_shift: f64,
    pub shift_length: f64,
    pub rest: f64,
    pub daily_hours: f64,
    pub weekly_hours: f64,
}

#[derive(Default)]
struct SlotMeasures {
    over: u64,
    zero: u64,
    short: u64,
    no_manager: u64,
}

fn slot_measures(schedule: &Schedule, instance: &Instance, masks: &EmployeeMasks) -> SlotMeasures {
    let demand = &instance.demand;
    let mut m = SlotMeasures::default();
    for d in 0..schedule.days() {
        for t in 0..SLOTS_PER_DAY {
            let total = schedule.slot_count(d, t);
            for s in Skill::ALL {
                let hc = schedule.slot_count_masked(d, t, &masks.skill[s.index()]);
                let (min, ideal) = (demand.min(d, t, s), demand.ideal(d, t, s));
                m.over += hc.saturating_sub(ideal) as u64;
                m.short += min.saturating_sub(hc) as u64;
            }
            if demand.total_min(d, t) == 0 {
                m.zero += total as u64;
            }
            if total > 0 && schedule.slot_count_masked(d, t, &masks.manager) == 0 {
                m.no_manager += 1;
            }
        }
    }
    m
}

/// `(over_coverage, zero_demand)`, the two f1 components.
pub fn cost_penalties(schedule: &Schedule, instance: &Instance) -> (f64, f64) {
    let m = slot_measures(schedule, instance, &instance.masks());
    let w = &instance.weights;
    (w.w_over * m.over as f64, w.w_zero * m.zero as f64)
}

/// `(shortfall, missing_manager)`, the two f2 components.
pub fn service_penalties(schedule: &Schedule, instance: &Instance) -> (f64, f64) {
    let m = slot_measures(schedule, instance, &instance.masks());
    let w = &instance.weights;
    (w.w_shortfall * m.short as f64, w.w_mgr * m.no_manager as f64)
}

/// Rest in minutes between the last worked slot of one day and the first of the next.
///
/// Measured between slot start times: `24*60 - 30*last + 30*first`.
#[inline]
pub fn rest_gap_minutes(last_slot_prev_day: usize, first_slot_next_day: usize) -> f64 {
    let slot = SLOT_MINUTES as f64;
    24.0 * 60.0 - last_slot_prev_day as f64 * slot + first_slot_next_day as f64 * slot
}

pub fn dissatisfaction_penalties(schedule: &Schedule, instance: &Instance) -> DissatisfactionPenalties {
    let c = &instance.constraints;
    let w = &instance.weights;
    let rest_needed = c.min_rest_hours * 60.0;

    let mut unavail = 0u64;
    let mut split = 0u64;
    let mut length = 0.0;
    let mut rest = 0.0;
    let mut daily = 0.0;
    let mut weekly = 0.0;

    for (e, emp) in instance.employees.iter().enumerate() {
        let mut week_slots = 0u32;
        let mut prev_last: Option<usize> = None;
        for d in 0..schedule.days() {
            let mask = schedule.day_mask(e, d);
            if mask == 0 {
                prev_last = None;
                continue;
            }
            unavail += (mask & emp.unavailable_mask(d)).count_ones() as u64;
            let blocks = runs_of(mask);
            split += blocks.len() as u64 - 1;
            for (a, b) in &blocks {
                let hours = 0.5 * (b - a + 1) as f64;
                length += (c.min_shift_hours - hours).max(0.0) + (hours - c.max_shift_hours).max(0.0);
            }
            let first = mask.trailing_zeros() as usize;
            let last = 63 - mask.leading_zeros() as usize;
            if let Some(p) = prev_last {
                rest += (rest_needed - rest_gap_minutes(p, first)).max(0.0) / 60.0;
            }
            prev_last = Some(last);
            let n = mask.count_ones();
            week_slots += n;
            daily += (0.5 * n as f64 - emp.max_daily_hours).max(0.0);
        }
        weekly += (0.5 * week_slots as f64 - emp.max_weekly_hours).max(0.0);
    }

    DissatisfactionPenalties {
        unavailability: w.w_unavail * unavail as f64,
        split_shift: w.w_split * split as f64,
        shift_length: w.w_length * length,
        rest: w.w_rest * rest,
        daily_hours: w.w_daily * daily,
        weekly_hours: w.w_weekly * weekly,
    }
}

/// Reusable evaluator holding the instance's employee masks.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    instance: &'a Instance,
    masks: EmployeeMasks,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Evaluator {
            instance,
            masks: instance.masks(),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn evaluate(&self, schedule: &Schedule) -> FitnessVector {
        let inst = self.instance;
        let w = &inst.weights;
        let m = slot_measures(schedule, inst, &self.masks);
        let ds = dissatisfaction_penalties(schedule, inst);
        FitnessVector::from_breakdown(PenaltyBreakdown {
            over_coverage: w.w_over * m.over as f64,
            zero_demand: w.w_zero * m.zero as f64,
            shortfall: w.w_shortfall * m.short as f64,
            missing_manager: w.w_mgr * m.no_manager as f64,
            unavailability: ds.unavailability,
            split_shift: ds.split_shift,
            shift_length: ds.shift_length,
            rest: ds.rest,
            daily_hours: ds.daily_hours,
            weekly_hours: ds.weekly_hours,
        })
    }

    /// Evaluates a batch, in parallel when the `parallel` feature is on.
    pub fn evaluate_all(&self, schedules: &[Schedule]) -> Vec<FitnessVector> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            schedules.par_iter().map(|s| self.evaluate(s)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            schedules.iter().map(|s| self.evaluate(s)).collect()
        }
    }
}

pub fn evaluate(schedule: &Schedule, instance: &Instance) -> FitnessVector {
    Evaluator::new(instance).evaluate(schedule)
}
