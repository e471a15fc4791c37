//! Slow, direct reference implementations used to check the optimized code,
//! plus small random instances to feed them.

#![allow(dead_code)]

use rand::Rng;
use roster_core::model::{DemandGrid, Employee, Instance, PenaltyWeights, Schedule, Skill, SLOTS_PER_DAY};
use roster_core::ConstraintParams;

/// `x[e][d][t]`, read one slot at a time.
fn assignment_grid(s: &Schedule, inst: &Instance) -> Vec<Vec<Vec<bool>>> {
    (0..inst.employees.len())
        .map(|e| {
            (0..inst.days)
                .map(|d| (0..SLOTS_PER_DAY).map(|t| s.is_assigned(d, t, e)).collect())
                .collect()
        })
        .collect()
}

/// The ten weighted components, summed term by term over `(e, d, t)`.
pub fn naive_breakdown(s: &Schedule, inst: &Instance) -> [f64; 10] {
    let x = assignment_grid(s, inst);
    let emps = &inst.employees;
    let c = &inst.constraints;
    let w = &inst.weights;

    let mut over = 0.0;
    let mut zero = 0.0;
    let mut short = 0.0;
    let mut mgr = 0.0;
    for d in 0..inst.days {
        for t in 0..SLOTS_PER_DAY {
            let mut all = 0u32;
            let mut managers = 0u32;
            let mut min_sum = 0u32;
            for (k, skill) in [Skill::L1, Skill::L2, Skill::L3, Skill::L4].into_iter().enumerate() {
                let mut hc = 0u32;
                for e in 0..emps.len() {
                    if x[e][d][t] && emps[e].skill == skill {
                        hc += 1;
                    }
                }
                let min = inst.demand.min_required[d][t][k];
                let ideal = inst.demand.ideal[d][t][k];
                min_sum += min;
                if hc > ideal {
                    over += (hc - ideal) as f64;
                }
                if min > hc {
                    short += (min - hc) as f64;
                }
            }
            for e in 0..emps.len() {
                if x[e][d][t] {
                    all += 1;
                    if emps[e].is_manager {
                        managers += 1;
                    }
                }
            }
            if min_sum == 0 {
                zero += all as f64;
            }
            if all > 0 && managers == 0 {
                mgr += 1.0;
            }
        }
    }

    let mut unavail = 0.0;
    let mut split = 0.0;
    let mut length = 0.0;
    let mut rest = 0.0;
    let mut daily = 0.0;
    let mut weekly = 0.0;
    for e in 0..emps.len() {
        let mut week_hours = 0.0;
        for d in 0..inst.days {
            let mut blocks: Vec<(usize, usize)> = Vec::new();
            let mut hours = 0.0;
            for t in 0..SLOTS_PER_DAY {
                if !x[e][d][t] {
                    continue;
                }
                hours += 0.5;
                if emps[e].unavailability[d][t] {
                    unavail += 1.0;
                }
                match blocks.last_mut() {
                    Some(b) if b.1 + 1 == t => b.1 = t,
                    _ => blocks.push((t, t)),
                }
            }
            if blocks.len() > 1 {
                split += (blocks.len() - 1) as f64;
            }
            for &(a, b) in &blocks {
                let h = 0.5 * (b - a + 1) as f64;
                if h < c.min_shift_hours {
                    length += c.min_shift_hours - h;
                }
                if h > c.max_shift_hours {
                    length += h - c.max_shift_hours;
                }
            }
            if hours > emps[e].max_daily_hours {
                daily += hours - emps[e].max_daily_hours;
            }
            week_hours += hours;

            if d + 1 < inst.days {
                let last = (0..SLOTS_PER_DAY).rev().find(|&t| x[e][d][t]);
                let first = (0..SLOTS_PER_DAY).find(|&t| x[e][d + 1][t]);
                if let (Some(last), Some(first)) = (last, first) {
                    let gap = 24.0 * 60.0 - 30.0 * last as f64 + 30.0 * first as f64;
                    let needed = c.min_rest_hours * 60.0;
                    if gap < needed {
                        rest += (needed - gap) / 60.0;
                    }
                }
            }
        }
        if week_hours > emps[e].max_weekly_hours {
            weekly += week_hours - emps[e].max_weekly_hours;
        }
    }

    [
        w.w_over * over,
        w.w_zero * zero,
        w.w_shortfall * short,
        w.w_mgr * mgr,
        w.w_unavail * unavail,
        w.w_split * split,
        w.w_length * length,
        w.w_rest * rest,
        w.w_daily * daily,
        w.w_weekly * weekly,
    ]
}

/// `a` is no worse everywhere and strictly better somewhere (minimization).
pub fn naive_dominates(a: &[f64; 3], b: &[f64; 3]) -> bool {
    (0..3).all(|i| a[i] <= b[i]) && (0..3).any(|i| a[i] < b[i])
}

/// Fronts by repeatedly peeling off the members nobody remaining dominates.
pub fn peel_fronts(points: &[[f64; 3]]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| naive_dominates(&points[j], &points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Weights on a quarter grid so sums stay exact.
pub fn random_weights<R: Rng>(rng: &mut R) -> PenaltyWeights {
    let mut q = || rng.gen_range(1..=40) as f64 * 0.25;
    PenaltyWeights {
        w_over: q(),
        w_zero: q(),
        w_shortfall: q(),
        w_mgr: q(),
        w_unavail: q(),
        w_split: q(),
        w_length: q(),
        w_rest: q(),
        w_daily: q(),
        w_weekly: q(),
    }
}

/// A small instance with random demand, unavailability, hour limits and weights.
pub fn random_instance<R: Rng>(rng: &mut R, max_employees: usize, max_days: usize) -> Instance {
    let days = rng.gen_range(1..=max_days);
    let n = rng.gen_range(1..=max_employees);
    let mut employees: Vec<Employee> = (0..n)
        .map(|i| {
            let skill = Skill::from_index(rng.gen_range(0..4)).unwrap();
            let mut e = Employee::new(format!("e{i}"), skill, rng.gen_bool(0.3), days);
            for d in 0..days {
                for t in 0..SLOTS_PER_DAY {
                    e.unavailability[d][t] = rng.gen_bool(0.1);
                }
            }
            e.max_daily_hours = rng.gen_range(8..=20) as f64 * 0.5;
            e.max_weekly_hours = e.max_daily_hours + rng.gen_range(0..=40) as f64 * 0.5;
            e
        })
        .collect();
    if !employees.iter().any(|e| e.is_manager) {
        employees[0].is_manager = true;
    }

    let mut demand = DemandGrid::zeros(days);
    let held: Vec<bool> = (0..4).map(|k| employees.iter().any(|e| e.skill.index() == k)).collect();
    for d in 0..days {
        let open = rng.gen_range(0..24);
        let close = rng.gen_range(open..SLOTS_PER_DAY);
        for t in open..=close {
            for k in 0..4 {
                if held[k] && rng.gen_bool(0.6) {
                    let min = rng.gen_range(0..=2);
                    demand.min_required[d][t][k] = min;
                    demand.ideal[d][t][k] = min + rng.gen_range(0..=1);
                }
            }
        }
    }

    let min_shift = rng.gen_range(1..=8) as f64 * 0.5;
    let constraints = ConstraintParams {
        min_shift_hours: min_shift,
        max_shift_hours: min_shift + rng.gen_range(0..=12) as f64 * 0.5,
        min_rest_hours: rng.gen_range(0..=24) as f64 * 0.5,
        ..ConstraintParams::default()
    };
    let inst = Instance {
        unit_id: "oracle".into(),
        days,
        employees,
        demand,
        constraints,
        weights: random_weights(rng),
    };
    inst.validate().expect("random instance is valid");
    inst
}

/// Mixture of empty days, scattered slots and one to three blocks per day.
pub fn random_assignment<R: Rng>(rng: &mut R, inst: &Instance) -> Schedule {
    let mut s = inst.empty_schedule();
    for e in 0..inst.employees.len() {
        for d in 0..inst.days {
            match rng.gen_range(0..4) {
                0 => {}
                1 => {
                    for t in 0..SLOTS_PER_DAY {
                        if rng.gen_bool(0.2) {
                            s.assign(d, t, e);
                        }
                    }
                }
                _ => {
                    for _ in 0..rng.gen_range(1..=3) {
                        let a = rng.gen_range(0..SLOTS_PER_DAY);
                        let b = rng.gen_range(a..SLOTS_PER_DAY.min(a + 24));
                        for t in a..=b {
                            s.assign(d, t, e);
                        }
                    }
                }
            }
        }
    }
    s
}

/// Two employees, one day: a manager (L1) and a nurse (L3); one L3 needed in
/// slots 12..=19, nothing else demanded.
pub fn toy_instance() -> Instance {
    let days = 1;
    let mut demand = DemandGrid::zeros(days);
    demand.set_range(0, 12..=19, Skill::L3, 1, 1);
    let inst = Instance {
        unit_id: "toy".into(),
        days,
        employees: vec![
            Employee::new("M", Skill::L1, true, days),
            Employee::new("N", Skill::L3, false, days),
        ],
        demand,
        constraints: ConstraintParams::default(),
        weights: PenaltyWeights::default(),
    };
    inst.validate().unwrap();
    inst
}

/// Exact minima `(min f2, min total)` of the toy instance.
///
/// Enumerates every subset of slots 12..=19 for both employees. Work outside
/// that window can be dropped without raising f2 or the total: it only adds
/// zero-demand and manager-gap charges, clipping a block never splits it, and
/// each dropped slot saves `w_zero` = 2 against at most 0.5 h of extra
/// shift-length deficit.
pub fn toy_brute_force(inst: &Instance) -> (f64, f64) {
    let mut best_f2 = f64::INFINITY;
    let mut best_total = f64::INFINITY;
    for a in 0u32..256 {
        for b in 0u32..256 {
            let mut s = inst.empty_schedule();
            for i in 0..8 {
                if a >> i & 1 == 1 {
                    s.assign(0, 12 + i, 0);
                }
                if b >> i & 1 == 1 {
                    s.assign(0, 12 + i, 1);
                }
            }
            let c = naive_breakdown(&s, inst);
            let f2 = c[2] + c[3];
            let total: f64 = c.iter().sum();
            best_f2 = best_f2.min(f2);
            best_total = best_total.min(total);
        }
    }
    (best_f2, best_total)
}
