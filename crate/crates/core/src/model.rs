//! Domain types: employees, demand, instances and the slot-set schedule.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Half-hour slots per day.
pub const SLOTS_PER_DAY: usize = 48;
/// Length of one slot in minutes.
pub const SLOT_MINUTES: u32 = 30;
/// Number of skill levels.
pub const SKILL_COUNT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Skill {
    L1,
    L2,
    L3,
    L4,
}

impl Skill {
    pub const ALL: [Skill; SKILL_COUNT] = [Skill::L1, Skill::L2, Skill::L3, Skill::L4];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Skill> {
        Skill::ALL.get(i).copied()
    }
}

impl fmt::Display for Skill {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Skill::L1 => "L1",
            Skill::L2 => "L2",
            Skill::L3 => "L3",
            Skill::L4 => "L4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Employee {
    pub id: String,
    pub skill: Skill,
    pub is_manager: bool,
    /// `unavailability[day][slot]` is true when the employee must not work that slot.
    pub unavailability: Vec<Vec<bool>>,
    pub max_daily_hours: f64,
    pub max_weekly_hours: f64,
    pub contracted_weekly_hours: f64,
}

impl Employee {
    /// Employee with no unavailability over `days` days and the default 9 h / 40 h limits.
    pub fn new(id: impl Into<String>, skill: Skill, is_manager: bool, days: usize) -> Self {
        Employee {
            id: id.into(),
            skill,
            is_manager,
            unavailability: vec![vec![false; SLOTS_PER_DAY]; days],
            max_daily_hours: 9.0,
            max_weekly_hours: 40.0,
            contracted_weekly_hours: 40.0,
        }
    }

    #[inline]
    pub fn is_unavailable(&self, day: usize, slot: usize) -> bool {
        self.unavailability[day][slot]
    }

    /// Bitmask of the unavailable slots on `day` (bit `t` set for slot `t`).
    pub fn unavailable_mask(&self, day: usize) -> u64 {
        self.unavailability[day]
            .iter()
            .enumerate()
            .filter(|(_, &u)| u)
            .fold(0u64, |m, (t, _)| m | (1 << t))
    }

    fn validate(&self, days: usize) -> Result<(), ModelError> {
        let path = format!("employees[{}]", self.id);
        if self.unavailability.len() != days || self.unavailability.iter().any(|d| d.len() != SLOTS_PER_DAY) {
            return Err(ModelError::invalid(
                format!("{path}.unavailability"),
                format!("grid must be {days} x {SLOTS_PER_DAY}"),
            ));
        }
        let finite = [
            self.max_daily_hours,
            self.max_weekly_hours,
            self.contracted_weekly_hours,
        ]
        .iter()
        .all(|h| h.is_finite());
        if !finite || !(self.max_daily_hours > 0.0 && self.max_daily_hours <= 24.0) {
            return Err(ModelError::invalid(
                format!("{path}.max_daily_hours"),
                "must lie in (0, 24]",
            ));
        }
        if self.max_daily_hours > self.max_weekly_hours {
            return Err(ModelError::invalid(
                format!("{path}.max_weekly_hours"),
                "must be at least max_daily_hours",
            ));
        }
        if self.contracted_weekly_hours < 0.0 {
            return Err(ModelError::invalid(
                format!("{path}.contracted_weekly_hours"),
                "must be non-negative",
            ));
        }
        Ok(())
    }
}

/// Per-skill minimum and ideal headcount, indexed `[day][slot][skill]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandGrid {
    #[serde(rename = "min")]
    pub min_required: Vec<Vec<[u32; SKILL_COUNT]>>,
    pub ideal: Vec<Vec<[u32; SKILL_COUNT]>>,
}

impl DemandGrid {
    pub fn zeros(days: usize) -> Self {
        DemandGrid {
            min_required: vec![vec![[0; SKILL_COUNT]; SLOTS_PER_DAY]; days],
            ideal: vec![vec![[0; SKILL_COUNT]; SLOTS_PER_DAY]; days],
        }
    }

    /// Sets both min and ideal for one skill over an inclusive slot range.
    pub fn set_range(
        &mut self,
        day: usize,
        slots: std::ops::RangeInclusive<usize>,
        skill: Skill,
        min: u32,
        ideal: u32,
    ) {
        for t in slots {
            self.min_required[day][t][skill.index()] = min;
            self.ideal[day][t][skill.index()] = ideal;
        }
    }

    #[inline]
    pub fn min(&self, day: usize, slot: usize, skill: Skill) -> u32 {
        self.min_required[day][slot][skill.index()]
    }

    #[inline]
    pub fn ideal(&self, day: usize, slot: usize, skill: Skill) -> u32 {
        self.ideal[day][slot][skill.index()]
    }

    /// Aggregate minimum over all skills.
    #[inline]
    pub fn total_min(&self, day: usize, slot: usize) -> u32 {
        self.min_required[day][slot].iter().sum()
    }

    pub fn days(&self) -> usize {
        self.min_required.len()
    }

    fn validate(&self, days: usize) -> Result<(), ModelError> {
        for (name, grid) in [("demand.min", &self.min_required), ("demand.ideal", &self.ideal)] {
            if grid.len() != days {
                return Err(ModelError::invalid(
                    name,
                    format!("expected {days} days, found {}", grid.len()),
                ));
            }
            for (d, day) in grid.iter().enumerate() {
                if day.len() != SLOTS_PER_DAY {
                    return Err(ModelError::invalid(
                        format!("{name}[{d}]"),
                        format!("expected {SLOTS_PER_DAY} slots, found {}", day.len()),
                    ));
                }
            }
        }
        for d in 0..days {
            for t in 0..SLOTS_PER_DAY {
                for s in 0..SKILL_COUNT {
                    if self.ideal[d][t][s] < self.min_required[d][t][s] {
                        return Err(ModelError::invalid(
                            format!("demand.ideal[{d}][{t}][{s}]"),
                            "ideal is below the minimum",
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintParams {
    pub min_shift_hours: f64,
    pub max_shift_hours: f64,
    pub min_rest_hours: f64,
    pub slot_minutes: u32,
}

impl Default for ConstraintParams {
    fn default() -> Self {
        ConstraintParams {
            min_shift_hours: 4.0,
            max_shift_hours: 9.0,
            min_rest_hours: 8.0,
            slot_minutes: SLOT_MINUTES,
        }
    }
}

impl ConstraintParams {
    /// Shortest shift in whole slots, rounding up.
    pub fn min_shift_slots(&self) -> usize {
        ((self.min_shift_hours * 2.0).ceil() as usize).clamp(1, SLOTS_PER_DAY)
    }

    /// Longest shift in whole slots, rounding down.
    pub fn max_shift_slots(&self) -> usize {
        ((self.max_shift_hours * 2.0).floor() as usize).clamp(1, SLOTS_PER_DAY)
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !(self.min_shift_hours > 0.0 && self.min_shift_hours <= self.max_shift_hours) {
            return Err(ModelError::invalid(
                "constraints.min_shift_hours",
                "need 0 < min_shift_hours <= max_shift_hours",
            ));
        }
        if !self.max_shift_hours.is_finite() {
            return Err(ModelError::invalid("constraints.max_shift_hours", "must be finite"));
        }
        if !(self.min_rest_hours >= 0.0 && self.min_rest_hours.is_finite()) {
            return Err(ModelError::invalid("constraints.min_rest_hours", "must be >= 0"));
        }
        if self.slot_minutes != SLOT_MINUTES {
            return Err(ModelError::invalid("constraints.slot_minutes", "must be 30"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyWeights {
    pub w_over: f64,
    pub w_zero: f64,
    pub w_shortfall: f64,
    pub w_mgr: f64,
    pub w_unavail: f64,
    pub w_split: f64,
    pub w_length: f64,
    pub w_rest: f64,
    pub w_daily: f64,
    pub w_weekly: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        PenaltyWeights {
            w_over: 1.0,
            w_zero: 2.0,
            w_shortfall: 10.0,
            w_mgr: 5.0,
            w_unavail: 1.0,
            w_split: 1.0,
            w_length: 1.0,
            w_rest: 1.0,
            w_daily: 1.0,
            w_weekly: 1.0,
        }
    }
}

impl PenaltyWeights {
    pub fn as_array(&self) -> [f64; 10] {
        [
            self.w_over,
            self.w_zero,
            self.w_shortfall,
            self.w_mgr,
            self.w_unavail,
            self.w_split,
            self.w_length,
            self.w_rest,
            self.w_daily,
            self.w_weekly,
        ]
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let w = self.as_array();
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(ModelError::invalid("weights", "all weights must be finite and >= 0"));
        }
        let groups = [
            ("cost", &w[0..2]),
            ("service", &w[2..4]),
            ("dissatisfaction", &w[4..10]),
        ];
        for (name, g) in groups {
            if g.iter().all(|x| *x == 0.0) {
                return Err(ModelError::invalid(
                    "weights",
                    format!("the {name} group needs at least one positive weight"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub unit_id: String,
    pub days: usize,
    pub employees: Vec<Employee>,
    pub demand: DemandGrid,
    pub constraints: ConstraintParams,
    pub weights: PenaltyWeights,
}

impl Instance {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.days == 0 {
            return Err(ModelError::invalid("days", "must be at least 1"));
        }
        if self.employees.is_empty() {
            return Err(ModelError::invalid("employees", "at least one employee is required"));
        }
        let mut ids: Vec<&str> = self.employees.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::invalid("employees", format!("duplicate id {:?}", w[0])));
        }
        for e in &self.employees {
            e.validate(self.days)?;
        }
        if !self.employees.iter().any(|e| e.is_manager) {
            return Err(ModelError::invalid("employees", "at least one manager is required"));
        }
        self.demand.validate(self.days)?;
        for skill in Skill::ALL {
            let demanded = self
                .demand
                .min_required
                .iter()
                .flatten()
                .zip(self.demand.ideal.iter().flatten())
                .any(|(m, i)| m[skill.index()] > 0 || i[skill.index()] > 0);
            if demanded && !self.employees.iter().any(|e| e.skill == skill) {
                return Err(ModelError::invalid(
                    "employees",
                    format!("skill {skill} is demanded but nobody holds it"),
                ));
            }
        }
        self.constraints.validate()?;
        self.weights.validate()
    }

    pub fn employee_index(&self, id: &str) -> Result<usize, ModelError> {
        self.employees
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| ModelError::UnknownEmployee(id.to_string()))
    }

    pub fn employee_count(&self) -> usize {
        self.employees.len()
    }

    pub fn empty_schedule(&self) -> Schedule {
        Schedule::new(self.days, self.employees.len())
    }

    /// Word masks selecting the employees of each skill, and of the managers.
    pub fn masks(&self) -> EmployeeMasks {
        let words = words_for(self.employees.len());
        let mut skill = vec![vec![0u64; words]; SKILL_COUNT];
        let mut manager = vec![0u64; words];
        for (i, e) in self.employees.iter().enumerate() {
            skill[e.skill.index()][i / 64] |= 1 << (i % 64);
            if e.is_manager {
                manager[i / 64] |= 1 << (i % 64);
            }
        }
        EmployeeMasks { skill, manager }
    }
}

#[derive(Debug, Clone)]
pub struct EmployeeMasks {
    pub skill: Vec<Vec<u64>>,
    pub manager: Vec<u64>,
}

/// Restricts [`Schedule::headcount`] to part of the staff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadcountFilter {
    Skill(Skill),
    Managers,
}

/// One maximal run of consecutive worked slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftBlock {
    pub day: usize,
    pub start_slot: usize,
    pub end_slot: usize,
    pub employee_id: String,
}

impl ShiftBlock {
    pub fn len_slots(&self) -> usize {
        self.end_slot - self.start_slot + 1
    }

    pub fn duration_hours(&self) -> f64 {
        0.5 * self.len_slots() as f64
    }
}

/// Splits a 48-bit day mask into maximal `(start, end)` runs, end inclusive.
pub fn runs_of(mut mask: u64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    while mask != 0 {
        let start = mask.trailing_zeros() as usize;
        let len = (!(mask >> start)).trailing_zeros() as usize;
        out.push((start, start + len - 1));
        if start + len >= 64 {
            break;
        }
        mask &= !(((1u64 << len) - 1) << start);
    }
    out
}

/// Mask with bits `start..=end` set.
#[inline]
pub fn span_mask(start: usize, end: usize) -> u64 {
    debug_assert!(start <= end && end < SLOTS_PER_DAY);
    ((1u64 << (end - start + 1)) - 1) << start
}

#[inline]
fn words_for(employees: usize) -> usize {
    employees.div_ceil(64).max(1)
}

/// A complete roster: for every day, 48 slot-sets of employee positions.
///
/// Employees are referred to by their position in the owning [`Instance`];
/// each slot-set is a fixed-width bitset, which keeps sets canonical and
/// makes cloning and crossover plain memory copies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    days: usize,
    employees: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Schedule {
    pub fn new(days: usize, employees: usize) -> Self {
        let words = words_for(employees);
        Schedule {
            days,
            employees,
            words,
            bits: vec![0; days * SLOTS_PER_DAY * words],
        }
    }

    pub fn days(&self) -> usize {
        self.days
    }

    pub fn employee_count(&self) -> usize {
        self.employees
    }

    /// Number of slots across the horizon, `days * 48`.
    pub fn flat_len(&self) -> usize {
        self.days * SLOTS_PER_DAY
    }

    pub fn same_shape(&self, other: &Schedule) -> bool {
        self.days == other.days && self.employees == other.employees
    }

    #[inline]
    fn base(&self, day: usize, slot: usize) -> usize {
        (day * SLOTS_PER_DAY + slot) * self.words
    }

    #[inline]
    pub fn slot_words(&self, day: usize, slot: usize) -> &[u64] {
        let b = self.base(day, slot);
        &self.bits[b..b + self.words]
    }

    #[inline]
    pub fn flat_slot_words(&self, flat: usize) -> &[u64] {
        let b = flat * self.words;
        &self.bits[b..b + self.words]
    }

    #[inline]
    pub fn is_assigned(&self, day: usize, slot: usize, employee: usize) -> bool {
        self.bits[self.base(day, slot) + employee / 64] & (1 << (employee % 64)) != 0
    }

    #[inline]
    pub fn assign(&mut self, day: usize, slot: usize, employee: usize) {
        debug_assert!(employee < self.employees);
        let b = self.base(day, slot);
        self.bits[b + employee / 64] |= 1 << (employee % 64);
    }

    #[inline]
    pub fn unassign(&mut self, day: usize, slot: usize, employee: usize) {
        let b = self.base(day, slot);
        self.bits[b + employee / 64] &= !(1 << (employee % 64));
    }

    /// Assigns or clears an employee over every slot set in `mask` on `day`.
    pub fn set_day_mask(&mut self, day: usize, employee: usize, mask: u64, on: bool) {
        let mut m = mask;
        while m != 0 {
            let t = m.trailing_zeros() as usize;
            if on {
                self.assign(day, t, employee);
            } else {
                self.unassign(day, t, employee);
            }
            m &= m - 1;
        }
    }

    /// Slots worked by `employee` on `day`, as a 48-bit mask.
    pub fn day_mask(&self, employee: usize, day: usize) -> u64 {
        let w = employee / 64;
        let bit = 1u64 << (employee % 64);
        let mut mask = 0u64;
        let mut idx = self.base(day, 0) + w;
        for t in 0..SLOTS_PER_DAY {
            if self.bits[idx] & bit != 0 {
                mask |= 1 << t;
            }
            idx += self.words;
        }
        mask
    }

    /// Employee positions in a slot, ascending.
    pub fn slot_members(&self, day: usize, slot: usize) -> impl Iterator<Item = usize> + '_ {
        self.slot_words(day, slot)
            .iter()
            .enumerate()
            .flat_map(|(w, &word)| BitIter(word).map(move |b| w * 64 + b))
    }

    #[inline]
    pub fn slot_count(&self, day: usize, slot: usize) -> u32 {
        self.slot_words(day, slot).iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    pub fn slot_count_masked(&self, day: usize, slot: usize, mask: &[u64]) -> u32 {
        self.slot_words(day, slot)
            .iter()
            .zip(mask)
            .map(|(w, m)| (w & m).count_ones())
            .sum()
    }

    /// Headcount of one slot, optionally restricted to a skill or to managers.
    pub fn headcount(
        &self,
        instance: &Instance,
        day: usize,
        slot: usize,
        filter: Option<HeadcountFilter>,
    ) -> Result<u32, ModelError> {
        self.check_index(day, slot)?;
        let n = self
            .slot_members(day, slot)
            .filter(|&e| {
                let emp = &instance.employees[e];
                match filter {
                    None => true,
                    Some(HeadcountFilter::Skill(s)) => emp.skill == s,
                    Some(HeadcountFilter::Managers) => emp.is_manager,
                }
            })
            .count();
        Ok(n as u32)
    }

    /// Maximal worked blocks of one employee on one day, in slot order.
    pub fn extract_blocks(
        &self,
        instance: &Instance,
        employee_id: &str,
        day: usize,
    ) -> Result<Vec<ShiftBlock>, ModelError> {
        let e = instance.employee_index(employee_id)?;
        if e >= self.employees {
            return Err(ModelError::UnknownEmployee(employee_id.to_string()));
        }
        self.check_index(day, 0)?;
        Ok(runs_of(self.day_mask(e, day))
            .into_iter()
            .map(|(start_slot, end_slot)| ShiftBlock {
                day,
                start_slot,
                end_slot,
                employee_id: employee_id.to_string(),
            })
            .collect())
    }

    fn check_index(&self, day: usize, slot: usize) -> Result<(), ModelError> {
        if day >= self.days {
            return Err(ModelError::OutOfRange(format!("day {day} (horizon has {})", self.days)));
        }
        if slot >= SLOTS_PER_DAY {
            return Err(ModelError::OutOfRange(format!("slot {slot}")));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Total assigned employee-slots.
    pub fn assignment_count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Copies the slot-set at flat position `flat` from `other`.
    pub fn copy_flat_slot(&mut self, other: &Schedule, flat: usize) {
        let b = flat * self.words;
        self.bits[b..b + self.words].copy_from_slice(&other.bits[b..b + self.words]);
    }

    /// Copies flat positions `from..to` from `other`.
    pub fn copy_flat_range(&mut self, other: &Schedule, from: usize, to: usize) {
        let (a, b) = (from * self.words, to * self.words);
        self.bits[a..b].copy_from_slice(&other.bits[a..b]);
    }

    /// Checks this schedule's shape against an instance.
    pub fn check_shape(&self, instance: &Instance) -> Result<(), ModelError> {
        if self.days != instance.days {
            return Err(ModelError::invalid(
                "days",
                format!("schedule has {} days, instance has {}", self.days, instance.days),
            ));
        }
        if self.employees != instance.employees.len() {
            return Err(ModelError::invalid(
                "employees",
                "schedule was built for a different employee set",
            ));
        }
        Ok(())
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}
