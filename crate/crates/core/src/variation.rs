//! Population initialization and the crossover/mutation operators.
//!
//! None of the operators repair soft-rule violations; split shifts, rest
//! breaches and the like are left for the f3 penalties to price.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::{CrossoverMix, GaConfig};
use crate::evaluation::rest_gap_minutes;
use crate::model::{runs_of, span_mask, Instance, Schedule, Skill, SLOTS_PER_DAY};
use crate::rng::{purpose, substream};

/// First and last slot with nonzero minimum demand on `day`.
pub fn operating_window(instance: &Instance, day: usize) -> Option<(usize, usize)> {
    let mut open = (0..SLOTS_PER_DAY).filter(|&t| instance.demand.total_min(day, t) > 0);
    let first = open.next()?;
    let last = open.next_back().unwrap_or(first);
    Some((first, last))
}

/// One schedule with random shift lengths and start times.
///
/// Each employee works each operating day with probability `work_probability`,
/// as a single block of `[L_min, L_max]` hours placed uniformly inside the
/// day's operating window (or anywhere in the day if it does not fit).
pub fn random_schedule<R: Rng + ?Sized>(instance: &Instance, work_probability: f64, rng: &mut R) -> Schedule {
    let mut s = instance.empty_schedule();
    let lo = instance.constraints.min_shift_slots();
    let hi = instance.constraints.max_shift_slots().max(lo);
    for d in 0..instance.days {
        let Some((open, close)) = operating_window(instance, d) else {
            continue;
        };
        for e in 0..instance.employees.len() {
            if !rng.gen_bool(work_probability) {
                continue;
            }
            let len = rng.gen_range(lo..=hi);
            let (from, to) = if close + 1 - open >= len {
                (open, close + 1 - len)
            } else {
                (0, SLOTS_PER_DAY - len)
            };
            let start = rng.gen_range(from..=to);
            s.set_day_mask(d, e, span_mask(start, start + len - 1), true);
        }
    }
    s
}

/// Chronological greedy roster, mimicking a manual scheduler.
///
/// Slots are visited in time order. While a skill is below its minimum, a
/// random eligible employee of that skill is added, extending their shift or
/// opening one. Eligible means available, within daily/weekly hour limits and
/// the maximum shift length, not already finished for the day, and (when
/// opening) rested since the previous day's shift. After that, shifts shorter than
/// `L_min` are extended while the skill is below its ideal. Nobody is ever
/// placed above the ideal or in a slot with no demand. Ties are broken with
/// `rng`.
pub fn greedy_construct<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Schedule {
    let n = instance.employees.len();
    let c = &instance.constraints;
    let demand = &instance.demand;
    let min_len = c.min_shift_slots();
    let max_len = c.max_shift_slots();
    let rest_needed = c.min_rest_hours * 60.0;
    let day_cap: Vec<u32> = instance
        .employees
        .iter()
        .map(|e| (e.max_daily_hours * 2.0).floor() as u32)
        .collect();
    let week_cap: Vec<u32> = instance
        .employees
        .iter()
        .map(|e| (e.max_weekly_hours * 2.0).floor() as u32)
        .collect();
    let by_skill: Vec<Vec<usize>> = Skill::ALL
        .iter()
        .map(|&s| (0..n).filter(|&e| instance.employees[e].skill == s).collect())
        .collect();

    let mut s = instance.empty_schedule();
    let mut week_slots = vec![0u32; n];
    let mut prev_last: Vec<Option<usize>> = vec![None; n];

    for d in 0..instance.days {
        let mut start: Vec<Option<usize>> = vec![None; n];
        let mut closed = vec![false; n];
        let mut day_slots = vec![0u32; n];

        for t in 0..SLOTS_PER_DAY {
            let mut added = vec![false; n];
            let mut hc = [0u32; 4];
            let fits = |e: usize, day_slots: &[u32], week_slots: &[u32], start: &[Option<usize>]| {
                !instance.employees[e].is_unavailable(d, t)
                    && day_slots[e] < day_cap[e]
                    && week_slots[e] < week_cap[e]
                    && start[e].is_none_or(|a| t - a < max_len)
            };

            for skill in Skill::ALL {
                let k = skill.index();
                let need = demand.min(d, t, skill);
                while hc[k] < need {
                    let pool: Vec<usize> = by_skill[k]
                        .iter()
                        .copied()
                        .filter(|&e| {
                            !added[e]
                                && !closed[e]
                                && fits(e, &day_slots, &week_slots, &start)
                                && (start[e].is_some()
                                    || prev_last[e].is_none_or(|p| rest_gap_minutes(p, t) >= rest_needed))
                        })
                        .collect();
                    let pick = pool.choose(rng).copied();
                    let Some(e) = pick else { break };
                    s.assign(d, t, e);
                    added[e] = true;
                    hc[k] += 1;
                    day_slots[e] += 1;
                    week_slots[e] += 1;
                    start[e].get_or_insert(t);
                }
            }

            if demand.total_min(d, t) > 0 {
                let mut short: Vec<usize> = (0..n)
                    .filter(|&e| {
                        !added[e]
                            && !closed[e]
                            && start[e].is_some_and(|a| t - a < min_len)
                            && fits(e, &day_slots, &week_slots, &start)
                    })
                    .collect();
                short.shuffle(rng);
                for e in short {
                    let k = instance.employees[e].skill.index();
                    if hc[k] < demand.ideal[d][t][k] {
                        s.assign(d, t, e);
                        added[e] = true;
                        hc[k] += 1;
                        day_slots[e] += 1;
                        week_slots[e] += 1;
                    }
                }
            }

            for e in 0..n {
                if start[e].is_some() && !added[e] {
                    closed[e] = true;
                }
            }
        }

        for (e, last) in prev_last.iter_mut().enumerate() {
            let mask = s.day_mask(e, d);
            *last = (mask != 0).then(|| 63 - mask.leading_zeros() as usize);
        }
    }
    s
}

/// Initial population: `ceil(N/2)` greedy schedules followed by `floor(N/2)`
/// random ones. Member `i` draws from its own substream of `seed`.
pub fn init_population(instance: &Instance, config: &GaConfig, seed: u64) -> Vec<Schedule> {
    let n = config.population_size;
    let greedy = n.div_ceil(2);
    (0..n)
        .map(|i| {
            let mut rng = substream(seed, purpose::INIT, 0, i as u64);
            if i < greedy {
                greedy_construct(instance, &mut rng)
            } else {
                random_schedule(instance, config.random_work_probability, &mut rng)
            }
        })
        .collect()
}

/// Child with days `[0, k)` from `p1` and `[k, D)` from `p2`.
pub fn day_point_at(p1: &Schedule, p2: &Schedule, k: usize) -> Schedule {
    assert!(p1.same_shape(p2));
    let mut child = p1.clone();
    child.copy_flat_range(p2, k * SLOTS_PER_DAY, p2.flat_len());
    child
}

pub fn crossover_day_point<R: Rng + ?Sized>(p1: &Schedule, p2: &Schedule, rng: &mut R) -> Schedule {
    let days = p1.days();
    if days <= 1 {
        return if rng.gen_bool(0.5) { p1.clone() } else { p2.clone() };
    }
    day_point_at(p1, p2, rng.gen_range(1..days))
}

/// Each slot-set is inherited whole from a parent chosen by coin flip.
pub fn crossover_uniform<R: Rng + ?Sized>(p1: &Schedule, p2: &Schedule, rng: &mut R) -> Schedule {
    assert!(p1.same_shape(p2));
    let mut child = p1.clone();
    for i in 0..p1.flat_len() {
        if rng.gen_bool(0.5) {
            child.copy_flat_slot(p2, i);
        }
    }
    child
}

/// Child equal to `p1` outside the flat slot range `[a, b)` and to `p2` inside it.
pub fn two_point_slot_at(p1: &Schedule, p2: &Schedule, a: usize, b: usize) -> Schedule {
    assert!(p1.same_shape(p2) && a <= b && b <= p1.flat_len());
    let mut child = p1.clone();
    child.copy_flat_range(p2, a, b);
    child
}

pub fn crossover_two_point_slot<R: Rng + ?Sized>(p1: &Schedule, p2: &Schedule, rng: &mut R) -> Schedule {
    let len = p1.flat_len();
    let x = rng.gen_range(0..=len);
    let y = rng.gen_range(0..=len);
    two_point_slot_at(p1, p2, x.min(y), x.max(y))
}

/// Applies one crossover operator drawn from `mix`.
pub fn crossover<R: Rng + ?Sized>(p1: &Schedule, p2: &Schedule, mix: &CrossoverMix, rng: &mut R) -> Schedule {
    let r: f64 = rng.gen();
    if r < mix.day_point {
        crossover_day_point(p1, p2, rng)
    } else if r < mix.day_point + mix.uniform {
        crossover_uniform(p1, p2, rng)
    } else {
        crossover_two_point_slot(p1, p2, rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    SwapEmployee,
    MoveShift,
    ChangeLength,
}

/// With probability `rate`, applies one mutation chosen uniformly.
pub fn mutate<R: Rng + ?Sized>(schedule: &Schedule, instance: &Instance, rate: f64, rng: &mut R) -> Schedule {
    if rate <= 0.0 || !rng.gen_bool(rate.min(1.0)) {
        return schedule.clone();
    }
    let kind = [
        MutationKind::SwapEmployee,
        MutationKind::MoveShift,
        MutationKind::ChangeLength,
    ][rng.gen_range(0..3)];
    mutate_with(schedule, instance, kind, rng)
}

/// Applies a specific mutation. Returns the input unchanged when it has no target.
pub fn mutate_with<R: Rng + ?Sized>(
    schedule: &Schedule,
    instance: &Instance,
    kind: MutationKind,
    rng: &mut R,
) -> Schedule {
    let mut s = schedule.clone();
    match kind {
        MutationKind::SwapEmployee => {
            let busy: Vec<usize> = (0..s.flat_len())
                .filter(|&i| s.flat_slot_words(i).iter().any(|&w| w != 0))
                .collect();
            let Some(&flat) = busy.choose(rng) else { return s };
            let (d, t) = (flat / SLOTS_PER_DAY, flat % SLOTS_PER_DAY);
            let members: Vec<usize> = s.slot_members(d, t).collect();
            let out = *members.choose(rng).expect("slot is non-empty");
            let candidates: Vec<usize> = (0..instance.employees.len())
                .filter(|&e| !s.is_assigned(d, t, e) && !instance.employees[e].is_unavailable(d, t))
                .collect();
            let Some(&inn) = candidates.choose(rng) else { return s };
            s.unassign(d, t, out);
            s.assign(d, t, inn);
        }
        MutationKind::MoveShift | MutationKind::ChangeLength => {
            let blocks = all_blocks(&s, instance.employees.len());
            let Some(&(e, d, a, b)) = blocks.choose(rng) else {
                return s;
            };
            let old = span_mask(a, b);
            let new = if kind == MutationKind::MoveShift {
                let delta = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
                let len = (b - a) as i64;
                let start = (a as i64 + delta).clamp(0, SLOTS_PER_DAY as i64 - 1 - len) as usize;
                span_mask(start, start + len as usize)
            } else {
                let grow = rng.gen_bool(0.5);
                let at_start = rng.gen_bool(0.5);
                let (na, nb) = match (grow, at_start) {
                    (true, true) if a > 0 => (a - 1, b),
                    (true, false) if b + 1 < SLOTS_PER_DAY => (a, b + 1),
                    (false, true) if a < b => (a + 1, b),
                    (false, false) if a < b => (a, b - 1),
                    _ => return s,
                };
                let (lo, hi) = (
                    instance.constraints.min_shift_slots(),
                    instance.constraints.max_shift_slots(),
                );
                let excess = |len: usize| lo.saturating_sub(len) + len.saturating_sub(hi);
                let (old_len, new_len) = (b - a + 1, nb - na + 1);
                // Stay within [L_min, L_max], or at least move toward it.
                if excess(new_len) > 0 && excess(new_len) >= excess(old_len) {
                    return s;
                }
                span_mask(na, nb)
            };
            if new != old {
                s.set_day_mask(d, e, old, false);
                s.set_day_mask(d, e, new, true);
            }
        }
    }
    s
}

/// Every `(employee, day, start, end)` block in the schedule.
fn all_blocks(s: &Schedule, employees: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for e in 0..employees {
        for d in 0..s.days() {
            for (a, b) in runs_of(s.day_mask(e, d)) {
                out.push((e, d, a, b));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::{cost_penalties, evaluate};
    use crate::model::{ConstraintParams, DemandGrid, Employee, PenaltyWeights};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ward(days: usize, employees: usize) -> Instance {
        let mut staff: Vec<Employee> = (0..employees)
            .map(|i| Employee::new(format!("e{i}"), Skill::L3, false, days))
            .collect();
        staff.push(Employee::new("boss", Skill::L1, true, days));
        let mut demand = DemandGrid::zeros(days);
        for d in 0..days {
            demand.set_range(d, 12..=47, Skill::L3, 2, 3);
        }
        Instance {
            unit_id: "w".into(),
            days,
            employees: staff,
            demand,
            constraints: ConstraintParams::default(),
            weights: PenaltyWeights::default(),
        }
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn forced_length_random_blocks() {
        let mut inst = ward(7, 6);
        inst.constraints.min_shift_hours = 4.0;
        inst.constraints.max_shift_hours = 4.0;
        let mut r = rng(1);
        for _ in 0..50 {
            let s = random_schedule(&inst, 0.7, &mut r);
            for e in 0..inst.employees.len() {
                for d in 0..7 {
                    for (a, b) in runs_of(s.day_mask(e, d)) {
                        assert_eq!(b - a + 1, 8);
                    }
                }
            }
        }
    }

    #[test]
    fn random_blocks_are_single_and_in_range() {
        let inst = ward(3, 5);
        let mut r = rng(2);
        for _ in 0..1000 {
            let s = random_schedule(&inst, 0.7, &mut r);
            for e in 0..inst.employees.len() {
                for d in 0..3 {
                    let blocks = runs_of(s.day_mask(e, d));
                    assert!(blocks.len() <= 1);
                    for (a, b) in blocks {
                        let len = b - a + 1;
                        assert!((8..=18).contains(&len), "{len}");
                    }
                }
            }
        }
    }

    #[test]
    fn random_schedule_is_seed_reproducible() {
        let inst = ward(7, 4);
        assert_eq!(
            random_schedule(&inst, 0.7, &mut rng(9)),
            random_schedule(&inst, 0.7, &mut rng(9))
        );
    }

    #[test]
    fn greedy_with_no_demand_is_empty() {
        let mut inst = ward(2, 3);
        inst.demand = DemandGrid::zeros(2);
        assert!(greedy_construct(&inst, &mut rng(0)).is_empty());
    }

    #[test]
    fn greedy_covers_single_block_exactly() {
        let mut inst = ward(1, 1);
        inst.demand = DemandGrid::zeros(1);
        inst.demand.set_range(0, 12..=27, Skill::L3, 1, 1);
        let s = greedy_construct(&inst, &mut rng(0));
        assert_eq!(s.day_mask(0, 0), span_mask(12, 27));
        assert_eq!(s.day_mask(1, 0), 0);
    }

    #[test]
    fn greedy_never_overstaffs() {
        let inst = ward(7, 8);
        for seed in 0..20 {
            let s = greedy_construct(&inst, &mut rng(seed));
            assert_eq!(cost_penalties(&s, &inst), (0.0, 0.0));
            let f = evaluate(&s, &inst);
            assert_eq!(f.breakdown.split_shift, 0.0);
            assert_eq!(f.breakdown.unavailability, 0.0);
            assert_eq!(f.breakdown.daily_hours, 0.0);
            assert_eq!(f.breakdown.weekly_hours, 0.0);
        }
    }

    #[test]
    fn init_population_split() {
        let inst = ward(2, 3);
        for (n, greedy) in [(2usize, 1usize), (400, 200)] {
            let cfg = GaConfig {
                population_size: n,
                ..GaConfig::default()
            };
            let pop = init_population(&inst, &cfg, 5);
            assert_eq!(pop.len(), n);
            let f1_zero = pop.iter().filter(|s| cost_penalties(s, &inst) == (0.0, 0.0)).count();
            // every greedy member is cost-free; random members almost never are
            assert!(f1_zero >= greedy);
            for s in &pop {
                s.check_shape(&inst).unwrap();
            }
        }
    }

    #[test]
    fn crossover_identity_parents() {
        let inst = ward(3, 4);
        let p = random_schedule(&inst, 0.7, &mut rng(3));
        let mut r = rng(4);
        assert_eq!(crossover_day_point(&p, &p, &mut r), p);
        assert_eq!(crossover_uniform(&p, &p, &mut r), p);
        assert_eq!(crossover_two_point_slot(&p, &p, &mut r), p);
    }

    #[test]
    fn day_point_takes_days_from_each_parent() {
        let inst = ward(7, 4);
        let p1 = random_schedule(&inst, 0.7, &mut rng(10));
        let p2 = random_schedule(&inst, 0.7, &mut rng(11));
        let c = day_point_at(&p1, &p2, 3);
        for d in 0..7 {
            let src = if d < 3 { &p1 } else { &p2 };
            for t in 0..SLOTS_PER_DAY {
                assert_eq!(c.slot_words(d, t), src.slot_words(d, t));
            }
        }
    }

    #[test]
    fn one_day_day_point_copies_a_parent() {
        let inst = ward(1, 4);
        let p1 = random_schedule(&inst, 0.7, &mut rng(10));
        let p2 = random_schedule(&inst, 0.7, &mut rng(11));
        let mut r = rng(0);
        for _ in 0..10 {
            let c = crossover_day_point(&p1, &p2, &mut r);
            assert!(c == p1 || c == p2);
        }
    }

    #[test]
    fn two_point_edge_cases() {
        let inst = ward(2, 4);
        let p1 = random_schedule(&inst, 0.7, &mut rng(20));
        let p2 = random_schedule(&inst, 0.7, &mut rng(21));
        assert_eq!(two_point_slot_at(&p1, &p2, 0, p1.flat_len()), p2);
        assert_eq!(two_point_slot_at(&p1, &p2, 17, 17), p1);
        let c = two_point_slot_at(&p1, &p2, 30, 70);
        for i in 0..c.flat_len() {
            let src = if (30..70).contains(&i) { &p2 } else { &p1 };
            assert_eq!(c.flat_slot_words(i), src.flat_slot_words(i));
        }
    }

    #[test]
    fn zero_rate_mutation_is_identity() {
        let inst = ward(2, 4);
        let s = random_schedule(&inst, 0.7, &mut rng(1));
        let mut r = rng(2);
        for _ in 0..100 {
            assert_eq!(mutate(&s, &inst, 0.0, &mut r), s);
        }
    }

    #[test]
    fn mutation_of_empty_schedule_is_identity() {
        let inst = ward(2, 4);
        let s = inst.empty_schedule();
        let mut r = rng(3);
        for kind in [
            MutationKind::SwapEmployee,
            MutationKind::MoveShift,
            MutationKind::ChangeLength,
        ] {
            assert_eq!(mutate_with(&s, &inst, kind, &mut r), s);
        }
    }

    #[test]
    fn length_mutation_respects_max() {
        let inst = ward(1, 1);
        let mut s = inst.empty_schedule();
        // 18 slots = 9 h = L_max, away from both day edges
        s.set_day_mask(0, 0, span_mask(14, 31), true);
        let mut r = rng(5);
        for _ in 0..200 {
            let m = mutate_with(&s, &inst, MutationKind::ChangeLength, &mut r);
            let blocks = runs_of(m.day_mask(0, 0));
            assert_eq!(blocks.len(), 1);
            let (a, b) = blocks[0];
            assert!(b - a < 18);
        }
    }

    #[test]
    fn move_shift_keeps_length() {
        let inst = ward(1, 1);
        let mut s = inst.empty_schedule();
        s.set_day_mask(0, 0, span_mask(0, 9), true);
        let mut r = rng(6);
        for _ in 0..100 {
            let m = mutate_with(&s, &inst, MutationKind::MoveShift, &mut r);
            let blocks = runs_of(m.day_mask(0, 0));
            assert_eq!(blocks.len(), 1);
            let (a, b) = blocks[0];
            assert_eq!(b - a, 9);
            assert!(a <= 2);
        }
    }

    #[test]
    fn swap_respects_unavailability() {
        let mut inst = ward(1, 2);
        for t in 0..SLOTS_PER_DAY {
            inst.employees[1].unavailability[0][t] = true;
        }
        let mut s = inst.empty_schedule();
        s.assign(0, 20, 0);
        let mut r = rng(7);
        for _ in 0..50 {
            let m = mutate_with(&s, &inst, MutationKind::SwapEmployee, &mut r);
            assert!(!m.is_assigned(0, 20, 1));
            assert_eq!(m.slot_count(0, 20), 1);
        }
    }
}
