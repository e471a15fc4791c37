//! Front post-processing and report data: balanced/extreme selection,
//! coverage, utilization and satisfaction, Gantt records, CSV tables.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baselines::{run_greedy_baseline, run_soga, TotalStats};
use crate::codec::{schedule_from_doc, schedule_to_doc, ScheduleDoc};
use crate::config::GaConfig;
use crate::error::{ModelError, SolveError};
use crate::evaluation::{rest_gap_minutes, FitnessVector, PenaltyBreakdown};
use crate::model::{runs_of, Instance, Schedule, Skill, SLOTS_PER_DAY};
use crate::moo::{run_nsga2_with, GenerationStats, Objectives};

const TIE_EPS: f64 = 1e-12;

/// Member with the smallest population standard deviation of its min-max
/// normalized objectives. Objectives with zero range normalize to 0.
pub fn select_balanced<T: Objectives>(front: &[T]) -> usize {
    assert!(!front.is_empty(), "front must not be empty");
    let objs: Vec<[f64; 3]> = front.iter().map(|f| f.objectives()).collect();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for o in &objs {
        for k in 0..3 {
            lo[k] = lo[k].min(o[k]);
            hi[k] = hi[k].max(o[k]);
        }
    }
    let spread = |o: &[f64; 3]| {
        let z: Vec<f64> = (0..3)
            .map(|k| {
                if hi[k] > lo[k] {
                    (o[k] - lo[k]) / (hi[k] - lo[k])
                } else {
                    0.0
                }
            })
            .collect();
        let mean = z.iter().sum::<f64>() / 3.0;
        (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0).sqrt()
    };
    let mut best = 0;
    let mut best_sd = spread(&objs[0]);
    for (i, o) in objs.iter().enumerate().skip(1) {
        let sd = spread(o);
        if sd < best_sd - TIE_EPS {
            best = i;
            best_sd = sd;
        }
    }
    best
}

/// Member minimizing objective `objective` (1, 2 or 3); ties go to the lower
/// total, then the lower index.
pub fn select_extreme(front: &[FitnessVector], objective: usize) -> Result<usize, ModelError> {
    if !(1..=3).contains(&objective) {
        return Err(ModelError::OutOfRange(format!("objective {objective}")));
    }
    if front.is_empty() {
        return Err(ModelError::OutOfRange("empty front".into()));
    }
    let k = objective - 1;
    let mut best = 0;
    for (i, f) in front.iter().enumerate().skip(1) {
        let (a, b) = (f.objectives()[k], front[best].objectives()[k]);
        if a < b || (a == b && f.total < front[best].total) {
            best = i;
        }
    }
    Ok(best)
}

/// `matrix[d][t]` = assigned headcount minus aggregate minimum demand.
pub fn coverage_matrix(schedule: &Schedule, instance: &Instance) -> Vec<Vec<i64>> {
    (0..schedule.days())
        .map(|d| {
            (0..SLOTS_PER_DAY)
                .map(|t| schedule.slot_count(d, t) as i64 - instance.demand.total_min(d, t) as i64)
                .collect()
        })
        .collect()
}

/// Per-skill variant: `matrix[d][t][s]`.
pub fn coverage_matrix_by_skill(schedule: &Schedule, instance: &Instance) -> Vec<Vec<[i64; 4]>> {
    let masks = instance.masks();
    (0..schedule.days())
        .map(|d| {
            (0..SLOTS_PER_DAY)
                .map(|t| {
                    let mut row = [0i64; 4];
                    for s in Skill::ALL {
                        row[s.index()] = schedule.slot_count_masked(d, t, &masks.skill[s.index()]) as i64
                            - instance.demand.min(d, t, s) as i64;
                    }
                    row
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageRate {
    pub percent: f64,
    /// False when the instance has no minimum demand; `percent` is then 100.
    pub defined: bool,
}

/// Share of minimum-demand slot-units that are met, per skill, in percent.
pub fn coverage_rate(schedule: &Schedule, instance: &Instance) -> CoverageRate {
    let masks = instance.masks();
    let (mut met, mut need) = (0u64, 0u64);
    for d in 0..schedule.days() {
        for t in 0..SLOTS_PER_DAY {
            for s in Skill::ALL {
                let min = instance.demand.min(d, t, s) as u64;
                let hc = schedule.slot_count_masked(d, t, &masks.skill[s.index()]) as u64;
                met += hc.min(min);
                need += min;
            }
        }
    }
    if need == 0 {
        CoverageRate {
            percent: 100.0,
            defined: false,
        }
    } else {
        CoverageRate {
            percent: 100.0 * met as f64 / need as f64,
            defined: true,
        }
    }
}

/// Percentage points removed from satisfaction per violation incident.
pub const SATISFACTION_DEDUCTION: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaffMetrics {
    pub employee_id: String,
    pub skill: Skill,
    pub assigned_hours: f64,
    pub utilization: f64,
    pub satisfaction: f64,
}

/// Utilization of contracted hours and honored-preference satisfaction.
///
/// Satisfaction starts from the share of the employee's unavailable slots
/// that were left free, then loses [`SATISFACTION_DEDUCTION`] points per
/// extra block in a day, per short rest between consecutive days, per day
/// over the daily limit and once for exceeding the weekly limit.
pub fn utilization_satisfaction(schedule: &Schedule, instance: &Instance) -> Vec<StaffMetrics> {
    let rest_needed = instance.constraints.min_rest_hours * 60.0;
    instance
        .employees
        .iter()
        .enumerate()
        .map(|(e, emp)| {
            let mut worked = 0u32;
            let mut unavailable = 0u32;
            let mut violated = 0u32;
            let mut incidents = 0u32;
            let mut prev_last: Option<usize> = None;
            for d in 0..schedule.days() {
                let mask = schedule.day_mask(e, d);
                let un = emp.unavailable_mask(d);
                unavailable += un.count_ones();
                violated += (mask & un).count_ones();
                if mask == 0 {
                    prev_last = None;
                    continue;
                }
                let n = mask.count_ones();
                worked += n;
                incidents += runs_of(mask).len() as u32 - 1;
                if 0.5 * n as f64 > emp.max_daily_hours {
                    incidents += 1;
                }
                let first = mask.trailing_zeros() as usize;
                if let Some(p) = prev_last {
                    if rest_gap_minutes(p, first) < rest_needed {
                        incidents += 1;
                    }
                }
                prev_last = Some(63 - mask.leading_zeros() as usize);
            }
            let hours = 0.5 * worked as f64;
            if hours > emp.max_weekly_hours {
                incidents += 1;
            }
            let utilization = if emp.contracted_weekly_hours > 0.0 {
                (100.0 * hours / emp.contracted_weekly_hours).min(100.0)
            } else {
                0.0
            };
            let honored = 100.0 * (1.0 - violated as f64 / unavailable.max(1) as f64);
            let satisfaction = (honored - SATISFACTION_DEDUCTION * incidents as f64).max(0.0);
            StaffMetrics {
                employee_id: emp.id.clone(),
                skill: emp.skill,
                assigned_hours: hours,
                utilization,
                satisfaction,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GanttKind {
    Shift,
    Unavailable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanttRecord {
    pub employee_id: String,
    pub day: usize,
    pub start_slot: usize,
    pub end_slot: usize,
    pub skill: Skill,
    pub kind: GanttKind,
}

/// Worked blocks and unavailability windows, employee by employee.
pub fn gantt_records(schedule: &Schedule, instance: &Instance) -> Vec<GanttRecord> {
    let mut out = Vec::new();
    for (e, emp) in instance.employees.iter().enumerate() {
        for d in 0..schedule.days() {
            let spans = [
                (GanttKind::Shift, schedule.day_mask(e, d)),
                (GanttKind::Unavailable, emp.unavailable_mask(d)),
            ];
            for (kind, mask) in spans {
                for (a, b) in runs_of(mask) {
                    out.push(GanttRecord {
                        employee_id: emp.id.clone(),
                        day: d,
                        start_slot: a,
                        end_slot: b,
                        skill: emp.skill,
                        kind,
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Greedy,
    Soga,
    Moo,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Method::Greedy),
            "soga" => Ok(Method::Soga),
            "moo" => Ok(Method::Moo),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub fitness: FitnessVector,
    pub schedule: ScheduleDoc,
}

/// Everything the `report` command needs, self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub seed: u64,
    pub config: GaConfig,
    pub greedy_runs: Option<usize>,
    pub greedy_stats: Option<TotalStats>,
    pub instance: Instance,
    pub front: Vec<FrontEntry>,
    /// Index of the balanced member (the only member for greedy and SOGA).
    pub selected: usize,
    pub coverage_rate: CoverageRate,
    pub staff: Vec<StaffMetrics>,
}

impl RunReport {
    pub fn build(
        method: Method,
        instance: &Instance,
        config: &GaConfig,
        front: Vec<(Schedule, FitnessVector)>,
    ) -> RunReport {
        assert!(!front.is_empty());
        let fits: Vec<FitnessVector> = front.iter().map(|(_, f)| *f).collect();
        let selected = select_balanced(&fits);
        let chosen = &front[selected].0;
        RunReport {
            method,
            seed: config.master_seed,
            config: config.clone(),
            greedy_runs: None,
            greedy_stats: None,
            coverage_rate: coverage_rate(chosen, instance),
            staff: utilization_satisfaction(chosen, instance),
            front: front
                .iter()
                .map(|(s, f)| FrontEntry {
                    fitness: *f,
                    schedule: schedule_to_doc(s, instance),
                })
                .collect(),
            instance: instance.clone(),
            selected,
        }
    }

    pub fn fitnesses(&self) -> Vec<FitnessVector> {
        self.front.iter().map(|e| e.fitness).collect()
    }

    pub fn schedule(&self, index: usize) -> Result<Schedule, ModelError> {
        let entry = self
            .front
            .get(index)
            .ok_or_else(|| ModelError::OutOfRange(format!("front index {index}")))?;
        schedule_from_doc(&entry.schedule, &self.instance)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.instance.validate()?;
        if self.front.is_empty() {
            return Err(ModelError::invalid("front", "must not be empty"));
        }
        if self.selected >= self.front.len() {
            return Err(ModelError::invalid("selected", "index outside the front"));
        }
        for (i, _) in self.front.iter().enumerate() {
            self.schedule(i)?;
        }
        let pct = |x: f64| (0.0..=100.0).contains(&x);
        if !pct(self.coverage_rate.percent) || self.staff.iter().any(|s| !pct(s.utilization) || !pct(s.satisfaction)) {
            return Err(ModelError::invalid("staff", "percentages must lie in [0, 100]"));
        }
        Ok(())
    }
}

/// Runs one method and assembles its report. `observe` sees each NSGA-II
/// generation; the other methods ignore it.
pub fn solve(
    method: Method,
    instance: &Instance,
    config: &GaConfig,
    greedy_runs: usize,
    observe: impl FnMut(&GenerationStats),
) -> Result<RunReport, SolveError> {
    match method {
        Method::Greedy => {
            let g = run_greedy_baseline(instance, greedy_runs, config.master_seed)?;
            let mut r = RunReport::build(method, instance, config, vec![(g.best, g.best_fitness)]);
            r.greedy_runs = Some(greedy_runs);
            r.greedy_stats = Some(g.total);
            Ok(r)
        }
        Method::Soga => {
            let s = run_soga(instance, config)?;
            Ok(RunReport::build(
                method,
                instance,
                config,
                vec![(s.best, s.best_fitness)],
            ))
        }
        Method::Moo => {
            let out = run_nsga2_with(instance, config, observe)?;
            let front = out.front.into_iter().map(|r| (r.schedule, r.fitness)).collect();
            Ok(RunReport::build(method, instance, config, front))
        }
    }
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn csv_error(e: impl std::fmt::Display) -> std::io::Error {
    std::io::Error::other(e.to_string())
}

fn csv_io(e: csv::Error) -> std::io::Error {
    if !e.is_io_error() {
        return csv_error(e);
    }
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        _ => unreachable!(),
    }
}

/// `index,f1,f2,f3,total,<ten components>,balanced`
pub fn write_pareto_csv<W: Write>(report: &RunReport, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index", "f1", "f2", "f3", "total"];
    header.extend(PenaltyBreakdown::NAMES);
    header.push("balanced");
    w.write_record(&header).map_err(csv_io)?;
    for (i, e) in report.front.iter().enumerate() {
        let f = &e.fitness;
        let mut row = vec![i.to_string(), f6(f.f1), f6(f.f2), f6(f.f3), f6(f.total)];
        row.extend(f.breakdown.as_array().iter().map(|&x| f6(x)));
        row.push(u8::from(i == report.selected).to_string());
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()
}

/// `employee_id,skill,day,start_slot,end_slot,kind` for the selected schedule.
pub fn write_gantt_csv<W: Write>(report: &RunReport, out: W) -> std::io::Result<()> {
    let s = report.schedule(report.selected).map_err(csv_error)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["employee_id", "skill", "day", "start_slot", "end_slot", "kind"])
        .map_err(csv_io)?;
    for r in gantt_records(&s, &report.instance) {
        let kind = match r.kind {
            GanttKind::Shift => "shift",
            GanttKind::Unavailable => "unavailable",
        };
        w.write_record([
            r.employee_id,
            r.skill.to_string(),
            r.day.to_string(),
            r.start_slot.to_string(),
            r.end_slot.to_string(),
            kind.to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

/// `day,slot,assigned,required,difference`, or with a `skill` column when
/// `per_skill` is set.
pub fn write_coverage_csv<W: Write>(report: &RunReport, per_skill: bool, out: W) -> std::io::Result<()> {
    let s = report.schedule(report.selected).map_err(csv_error)?;
    let inst = &report.instance;
    let mut w = csv::Writer::from_writer(out);
    if per_skill {
        w.write_record(["day", "slot", "skill", "assigned", "required", "difference"])
            .map_err(csv_io)?;
        let m = coverage_matrix_by_skill(&s, inst);
        for d in 0..s.days() {
            for t in 0..SLOTS_PER_DAY {
                for sk in Skill::ALL {
                    let req = inst.demand.min(d, t, sk) as i64;
                    let diff = m[d][t][sk.index()];
                    w.write_record([
                        d.to_string(),
                        t.to_string(),
                        sk.to_string(),
                        (req + diff).to_string(),
                        req.to_string(),
                        diff.to_string(),
                    ])
                    .map_err(csv_io)?;
                }
            }
        }
    } else {
        w.write_record(["day", "slot", "assigned", "required", "difference"])
            .map_err(csv_io)?;
        let m = coverage_matrix(&s, inst);
        for d in 0..s.days() {
            for t in 0..SLOTS_PER_DAY {
                let req = inst.demand.total_min(d, t) as i64;
                w.write_record([
                    d.to_string(),
                    t.to_string(),
                    (req + m[d][t]).to_string(),
                    req.to_string(),
                    m[d][t].to_string(),
                ])
                .map_err(csv_io)?;
            }
        }
    }
    w.flush()
}

/// `employee_id,skill,assigned_hours,utilization_pct,satisfaction_pct`
pub fn write_staff_csv<W: Write>(report: &RunReport, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "employee_id",
        "skill",
        "assigned_hours",
        "utilization_pct",
        "satisfaction_pct",
    ])
    .map_err(csv_io)?;
    for m in &report.staff {
        w.write_record([
            m.employee_id.clone(),
            m.skill.to_string(),
            f6(m.assigned_hours),
            f6(m.utilization),
            f6(m.satisfaction),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{span_mask, ConstraintParams, DemandGrid, Employee, PenaltyWeights};

    fn fv(a: f64, b: f64, c: f64) -> FitnessVector {
        FitnessVector::from_objectives(a, b, c)
    }

    #[test]
    fn balanced_singleton() {
        assert_eq!(select_balanced(&[fv(3.0, 1.0, 4.0)]), 0);
    }

    #[test]
    fn balanced_picks_middle() {
        let front = [fv(0.0, 1.0, 1.0), fv(0.5, 0.5, 0.5), fv(1.0, 0.0, 0.0)];
        assert_eq!(select_balanced(&front), 1);
    }

    #[test]
    fn balanced_is_scale_invariant() {
        let front = [
            fv(0.0, 10.0, 3.0),
            fv(4.0, 4.0, 2.0),
            fv(9.0, 1.0, 0.0),
            fv(2.0, 8.0, 1.0),
        ];
        let base = select_balanced(&front);
        for k in 0..3 {
            for lambda in [0.001, 0.5, 3.0, 1e6] {
                let scaled: Vec<FitnessVector> = front
                    .iter()
                    .map(|f| {
                        let mut o = f.objectives();
                        o[k] *= lambda;
                        fv(o[0], o[1], o[2])
                    })
                    .collect();
                assert_eq!(select_balanced(&scaled), base);
            }
        }
    }

    #[test]
    fn extreme_selection() {
        let front = [
            fv(5.0, 1.0, 1.0),
            fv(1.0, 9.0, 9.0),
            fv(1.0, 2.0, 2.0),
            fv(3.0, 0.0, 0.0),
        ];
        assert_eq!(select_extreme(&front, 1).unwrap(), 2, "tie on f1 broken by total");
        assert_eq!(select_extreme(&front, 2).unwrap(), 3);
        assert_eq!(select_extreme(&[fv(1.0, 1.0, 1.0)], 3).unwrap(), 0);
        assert!(select_extreme(&front, 0).is_err());
        assert!(select_extreme(&front, 4).is_err());
    }

    fn ward() -> Instance {
        let mut demand = DemandGrid::zeros(2);
        demand.set_range(0, 12..=27, Skill::L3, 1, 2);
        demand.set_range(1, 20..=35, Skill::L3, 1, 2);
        Instance {
            unit_id: "w".into(),
            days: 2,
            employees: vec![
                Employee::new("a", Skill::L3, false, 2),
                Employee::new("b", Skill::L3, false, 2),
                Employee::new("m", Skill::L1, true, 2),
            ],
            demand,
            constraints: ConstraintParams::default(),
            weights: PenaltyWeights::default(),
        }
    }

    fn exact_min(inst: &Instance) -> Schedule {
        let mut s = inst.empty_schedule();
        s.set_day_mask(0, 0, span_mask(12, 27), true);
        s.set_day_mask(1, 1, span_mask(20, 35), true);
        s
    }

    #[test]
    fn coverage_of_exact_and_empty_schedules() {
        let inst = ward();
        let s = exact_min(&inst);
        assert!(coverage_matrix(&s, &inst).iter().flatten().all(|&c| c == 0));
        assert_eq!(coverage_rate(&s, &inst).percent, 100.0);

        let empty = inst.empty_schedule();
        let m = coverage_matrix(&empty, &inst);
        for d in 0..2 {
            for t in 0..SLOTS_PER_DAY {
                assert_eq!(m[d][t], -(inst.demand.total_min(d, t) as i64));
            }
        }
        assert_eq!(coverage_rate(&empty, &inst).percent, 0.0);
    }

    #[test]
    fn half_coverage() {
        let inst = ward();
        let mut s = inst.empty_schedule();
        s.set_day_mask(0, 0, span_mask(12, 27), true);
        assert_eq!(coverage_rate(&s, &inst).percent, 50.0);
    }

    #[test]
    fn no_demand_coverage_is_flagged() {
        let mut inst = ward();
        inst.demand = DemandGrid::zeros(2);
        let r = coverage_rate(&inst.empty_schedule(), &inst);
        assert_eq!(
            r,
            CoverageRate {
                percent: 100.0,
                defined: false
            }
        );
    }

    #[test]
    fn utilization_and_satisfaction() {
        let mut inst = ward();
        let mut s = inst.empty_schedule();
        // a: 20 h over two days out of 40 contracted, no unavailability
        s.set_day_mask(0, 0, span_mask(10, 29), true);
        s.set_day_mask(1, 0, span_mask(20, 39), true);
        // b: 8 unavailable slots, 2 of them worked
        for t in 30..38 {
            inst.employees[1].unavailability[0][t] = true;
        }
        s.set_day_mask(0, 1, span_mask(22, 31), true);
        let m = utilization_satisfaction(&s, &inst);
        assert_eq!(m[0].utilization, 50.0);
        // a works 10 h per day against a 9 h daily limit: two incidents
        assert_eq!(m[0].satisfaction, 90.0);
        assert_eq!(m[1].satisfaction, 75.0);
        assert_eq!(m[2].satisfaction, 100.0);
        assert_eq!(m[2].utilization, 0.0);
    }

    #[test]
    fn gantt_lists_shifts_and_leave() {
        let mut inst = ward();
        inst.employees[2].unavailability[1][40] = true;
        let s = exact_min(&inst);
        let g = gantt_records(&s, &inst);
        assert_eq!(g.len(), 3);
        assert_eq!(g[0].kind, GanttKind::Shift);
        assert_eq!((g[0].day, g[0].start_slot, g[0].end_slot), (0, 12, 27));
        assert_eq!(g[2].kind, GanttKind::Unavailable);
        assert_eq!(g[2].employee_id, "m");
    }

    #[test]
    fn csv_tables_have_stable_headers() {
        let inst = ward();
        let s = exact_min(&inst);
        let f = crate::evaluation::evaluate(&s, &inst);
        let report = RunReport::build(Method::Soga, &inst, &GaConfig::default(), vec![(s, f)]);
        report.validate().unwrap();

        let mut buf = Vec::new();
        write_pareto_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,f1,f2,f3,total,over_coverage,"));
        assert!(text.lines().nth(1).unwrap().ends_with(",1"));
        assert!(text.contains(&format!("{:.6}", f.total)));

        let mut buf = Vec::new();
        write_coverage_csv(&report, false, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 2 * 48);

        let mut buf = Vec::new();
        write_coverage_csv(&report, true, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 2 * 48 * 4);

        let mut buf = Vec::new();
        write_staff_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "employee_id,skill,assigned_hours,utilization_pct,satisfaction_pct"
        );

        let mut buf = Vec::new();
        write_gantt_csv(&report, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }
}
